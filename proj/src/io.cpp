#include "switchgrid/io.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <system_error>

#include "switchgrid/errors.hpp"

namespace switchgrid::io {

namespace {

using nlohmann::json;

void append_double(std::string& out, double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    out += buf;
}

} // namespace

std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

void write_text_atomic(const std::filesystem::path& path, const std::string& content) {
    if (path.has_parent_path()) {
        std::error_code ec;
        std::filesystem::create_directories(path.parent_path(), ec);
        if (ec)
            throw ConfigError("cannot create directory " + path.parent_path().string() + ": " +
                              ec.message());
    }
    const std::filesystem::path tmp = path.string() + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out)
            throw ConfigError("cannot write " + tmp.string());
        out.write(content.data(), static_cast<std::streamsize>(content.size()));
        if (!out)
            throw ConfigError("write failed for " + tmp.string());
    }
    std::error_code ec;
    std::filesystem::rename(tmp, path, ec);
    if (ec)
        throw ConfigError("cannot move " + tmp.string() + " into place: " + ec.message());
}

void write_json(const std::filesystem::path& path, const json& doc) {
    write_text_atomic(path, doc.dump(2) + "\n");
}

std::string field_csv(const ValueField& field) {
    const Grid& grid = *field.grid;
    std::string out = "t";
    for (int k = 0; k < grid.dim; ++k)
        out += ",x_" + std::to_string(k + 1);
    out += ",regime,value\n";
    out.reserve(out.size() +
                static_cast<std::size_t>(field.levels) * field.regimes * grid.nnodes * 32);
    for (int lev = 0; lev < field.levels; ++lev) {
        const double t = field.time(lev);
        for (int i = 0; i < field.regimes; ++i) {
            const double* v = field.level_data(lev, i);
            for (long long p = 0; p < grid.nnodes; ++p) {
                append_double(out, t);
                for (int k = 0; k < grid.dim; ++k) {
                    out += ',';
                    append_double(out, grid.axes[k][grid.axis_index(p, k)]);
                }
                out += ',';
                out += std::to_string(i + 1);
                out += ',';
                append_double(out, v[p]);
                out += '\n';
            }
        }
    }
    return out;
}

json field_meta(const ValueField& field) {
    const Grid& grid = *field.grid;
    json meta;
    meta["model"] = field.model_name;
    meta["penalty"] = field.penalty;
    meta["regimes"] = field.regimes;
    meta["dt"] = field.dt;
    meta["horizon"] = field.horizon;
    meta["grid"]["lo"] = grid.spec.lo;
    meta["grid"]["hi"] = grid.spec.hi;
    meta["grid"]["nodes"] = grid.spec.nodes;
    meta["grid"]["time_steps"] = grid.spec.time_steps;
    return meta;
}

void write_field(const std::filesystem::path& csv_path, const ValueField& field) {
    write_text_atomic(csv_path, field_csv(field));
    write_json(csv_path.string() + ".meta.json", field_meta(field));
}

ValueField read_field(const std::filesystem::path& csv_path, const ModelSpec& spec) {
    const std::filesystem::path meta_path = csv_path.string() + ".meta.json";
    std::ifstream meta_in(meta_path);
    if (!meta_in)
        throw ConfigError("cannot open " + meta_path.string());
    json meta;
    try {
        meta = json::parse(meta_in);
    } catch (const json::parse_error& e) {
        throw ConfigError(meta_path.string() + ": " + e.what());
    }

    GridSpec gspec;
    try {
        gspec.lo = meta.at("grid").at("lo").get<Point>();
        gspec.hi = meta.at("grid").at("hi").get<Point>();
        gspec.nodes = meta.at("grid").at("nodes").get<std::vector<int>>();
        gspec.time_steps = meta.at("grid").at("time_steps").get<int>();
        gspec.min_penalty = meta.at("penalty").get<int>();
    } catch (const json::exception& e) {
        throw ConfigError(meta_path.string() + ": " + e.what());
    }

    ValueField field;
    field.grid = build_grid(spec, gspec);
    field.regimes = meta.at("regimes").get<int>();
    field.levels = gspec.time_steps + 1;
    field.dt = meta.at("dt").get<double>();
    field.horizon = meta.at("horizon").get<double>();
    field.penalty = meta.at("penalty").get<int>();
    field.model_name = meta.at("model").get<std::string>();
    if (field.regimes != spec.regimes)
        throw ConfigError(csv_path.string() + ": regime count does not match the model");
    const Grid& grid = *field.grid;
    field.v.assign(static_cast<std::size_t>(field.levels) * field.regimes * grid.nnodes, 0.0);

    std::ifstream in(csv_path);
    if (!in)
        throw ConfigError("cannot open " + csv_path.string());
    std::string line;
    if (!std::getline(in, line))
        throw ConfigError(csv_path.string() + ": empty file");

    const long long rows_expected =
        static_cast<long long>(field.levels) * field.regimes * grid.nnodes;
    long long row = 0;
    const int fields_per_row = grid.dim + 3;
    std::vector<double> cells(static_cast<std::size_t>(fields_per_row));
    while (std::getline(in, line)) {
        if (line.empty())
            continue;
        if (row >= rows_expected)
            throw ConfigError(csv_path.string() + ": more rows than the grid holds");
        const char* s = line.c_str();
        for (int c = 0; c < fields_per_row; ++c) {
            char* end = nullptr;
            cells[c] = std::strtod(s, &end);
            if (end == s)
                throw ConfigError(csv_path.string() + ": bad number in row " +
                                  std::to_string(row + 2));
            s = end;
            if (c + 1 < fields_per_row) {
                if (*s != ',')
                    throw ConfigError(csv_path.string() + ": expected " +
                                      std::to_string(fields_per_row) + " columns in row " +
                                      std::to_string(row + 2));
                ++s;
            }
        }
        const int lev = static_cast<int>(row / (static_cast<long long>(field.regimes) * grid.nnodes));
        const int regime = static_cast<int>((row / grid.nnodes) % field.regimes);
        const long long node = row % grid.nnodes;
        if (std::abs(cells[0] - field.time(lev)) > 1e-9 * std::max(1.0, field.horizon))
            throw ConfigError(csv_path.string() + ": unexpected time in row " +
                              std::to_string(row + 2));
        for (int k = 0; k < grid.dim; ++k) {
            const double want = grid.axes[k][grid.axis_index(node, k)];
            if (std::abs(cells[1 + k] - want) > 1e-9 * std::max(1.0, std::abs(want)))
                throw ConfigError(csv_path.string() + ": unexpected coordinate in row " +
                                  std::to_string(row + 2));
        }
        if (cells[grid.dim + 1] != regime + 1)
            throw ConfigError(csv_path.string() + ": unexpected regime in row " +
                              std::to_string(row + 2));
        const double value = cells[grid.dim + 2];
        if (!std::isfinite(value))
            throw ConfigError(csv_path.string() + ": non-finite value in row " +
                              std::to_string(row + 2));
        field.at(lev, regime, node) = value;
        ++row;
    }
    if (row != rows_expected)
        throw ConfigError(csv_path.string() + ": expected " + std::to_string(rows_expected) +
                          " rows, found " + std::to_string(row));
    return field;
}

std::string paths_csv(const std::vector<std::vector<TraceRow>>& traces, int dim) {
    std::string out = "path_id,t";
    for (int k = 0; k < dim; ++k)
        out += ",x_" + std::to_string(k + 1);
    out += ",regime,event\n";
    for (std::size_t id = 0; id < traces.size(); ++id) {
        for (const TraceRow& r : traces[id]) {
            out += std::to_string(id);
            out += ',';
            append_double(out, r.t);
            for (int k = 0; k < dim; ++k) {
                out += ',';
                append_double(out, r.x[k]);
            }
            out += ',';
            out += std::to_string(r.regime + 1);
            out += ',';
            out += r.event;
            out += '\n';
        }
    }
    return out;
}

} // namespace switchgrid::io
