#include "fracmv/io/io.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <system_error>

#include "fracmv/core/error.hpp"

namespace fracmv {

std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::string paths_to_csv(const std::vector<SamplePath>& paths) {
    require(!paths.empty(), "paths_to_csv: no paths");
    const std::size_t d = paths.front().dim();
    const TimeGrid& grid = paths.front().grid();
    std::string out = "path_id,t";
    for (std::size_t c = 0; c < d; ++c) out += ",x" + std::to_string(c);
    out += '\n';
    for (std::size_t p = 0; p < paths.size(); ++p) {
        require(paths[p].grid() == grid && paths[p].dim() == d, "paths_to_csv: paths must share grid and dimension");
        for (std::size_t k = 0; k < grid.n_nodes(); ++k) {
            out += std::to_string(p);
            out += ',';
            out += format_double(grid.node(k));
            for (std::size_t c = 0; c < d; ++c) {
                out += ',';
                out += format_double(paths[p](k, c));
            }
            out += '\n';
        }
    }
    return out;
}

namespace {

std::vector<std::string> split(const std::string& line, char sep) {
    std::vector<std::string> out;
    std::string cell;
    std::istringstream in(line);
    while (std::getline(in, cell, sep)) out.push_back(cell);
    if (!line.empty() && line.back() == sep) out.emplace_back();
    return out;
}

double parse_double(const std::string& s) {
    std::size_t used = 0;
    double v = 0.0;
    try {
        v = std::stod(s, &used);
    } catch (const std::exception&) {
        throw DomainError("csv: malformed number '" + s + "'");
    }
    require(used == s.size(), "csv: malformed number '" + s + "'");
    return v;
}

}  // namespace

std::vector<SamplePath> paths_from_csv(const std::string& text) {
    std::istringstream in(text);
    std::string line;
    require(static_cast<bool>(std::getline(in, line)), "csv: empty input");
    const auto header = split(line, ',');
    require(header.size() >= 3 && header[0] == "path_id" && header[1] == "t", "csv: expected header path_id,t,x0,...");
    const std::size_t d = header.size() - 2;
    std::vector<std::size_t> ids;
    std::vector<double> times, values;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        const auto cells = split(line, ',');
        require(cells.size() == d + 2, "csv: row has the wrong number of columns");
        const double id = parse_double(cells[0]);
        require(id >= 0.0 && id == std::floor(id), "csv: path_id must be a nonnegative integer");
        ids.push_back(static_cast<std::size_t>(id));
        times.push_back(parse_double(cells[1]));
        for (std::size_t c = 0; c < d; ++c) values.push_back(parse_double(cells[c + 2]));
    }
    require(!ids.empty(), "csv: no data rows");
    std::size_t nodes = 0;
    while (nodes < ids.size() && ids[nodes] == ids[0]) ++nodes;
    require(nodes >= 2, "csv: each path needs at least two nodes");
    require(ids.size() % nodes == 0, "csv: paths have different lengths");
    const TimeGrid grid(times[nodes - 1], nodes - 1);
    std::vector<SamplePath> paths;
    for (std::size_t p = 0; p * nodes < ids.size(); ++p) {
        std::vector<double> v(values.begin() + static_cast<std::ptrdiff_t>(p * nodes * d),
                              values.begin() + static_cast<std::ptrdiff_t>((p + 1) * nodes * d));
        for (std::size_t k = 0; k < nodes; ++k) {
            require(ids[p * nodes + k] == p, "csv: path ids must be consecutive from 0");
            require(std::abs(times[p * nodes + k] - grid.node(k)) <= 1e-12 * std::max(1.0, grid.t_end()),
                    "csv: times are not a uniform grid");
        }
        paths.emplace_back(grid, d, std::move(v));
    }
    return paths;
}

std::string stepped_to_csv(const SteppedFunction& h) {
    std::string out = "cell,t_start,t_end";
    for (std::size_t c = 0; c < h.dim(); ++c) out += ",h" + std::to_string(c);
    out += '\n';
    for (std::size_t k = 0; k < h.n_cells(); ++k) {
        out += std::to_string(k) + ',' + format_double(h.grid().node(k)) + ',' + format_double(h.grid().node(k + 1));
        for (std::size_t c = 0; c < h.dim(); ++c) out += ',' + format_double(h(k, c));
        out += '\n';
    }
    return out;
}

std::string read_text_file(const std::filesystem::path& file) {
    std::ifstream in(file, std::ios::binary);
    require(static_cast<bool>(in), "cannot open '" + file.string() + "'");
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

void write_file_atomic(const std::filesystem::path& file, const std::string& contents) {
    if (file.has_parent_path()) std::filesystem::create_directories(file.parent_path());
    auto tmp = file;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        require(static_cast<bool>(out), "cannot write '" + tmp.string() + "'");
        out << contents;
        out.flush();
        require(static_cast<bool>(out), "write failed for '" + tmp.string() + "'");
    }
    std::error_code ec;
    std::filesystem::rename(tmp, file, ec);
    require(!ec, "cannot rename '" + tmp.string() + "' into place: " + ec.message());
}

}  // namespace fracmv
