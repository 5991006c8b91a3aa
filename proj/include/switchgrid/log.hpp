#pragma once

#include <string>

namespace switchgrid::log {

enum class Level { error = 0, info = 1, debug = 2 };

// Threshold comes from SWITCHGRID_LOG (error|info|debug), default "error".
Level threshold();
void set_threshold(Level lvl);

void error(const std::string& msg);
void info(const std::string& msg);
void debug(const std::string& msg);

} // namespace switchgrid::log
