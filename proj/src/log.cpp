#include "switchgrid/log.hpp"

#include <cstdio>
#include <cstdlib>
#include <cstring>

namespace switchgrid::log {

namespace {

Level parse_env() {
    const char* v = std::getenv("SWITCHGRID_LOG");
    if (v == nullptr) return Level::error;
    if (std::strcmp(v, "debug") == 0) return Level::debug;
    if (std::strcmp(v, "info") == 0) return Level::info;
    return Level::error;
}

Level g_threshold = parse_env();

void emit(Level lvl, const char* tag, const std::string& msg) {
    if (static_cast<int>(lvl) > static_cast<int>(g_threshold)) return;
    std::fprintf(stderr, "[%s] %s\n", tag, msg.c_str());
}

} // namespace

Level threshold() { return g_threshold; }
void set_threshold(Level lvl) { g_threshold = lvl; }

void error(const std::string& msg) { emit(Level::error, "error", msg); }
void info(const std::string& msg) { emit(Level::info, "info", msg); }
void debug(const std::string& msg) { emit(Level::debug, "debug", msg); }

} // namespace switchgrid::log
