#include "wigkit/field_io.hpp"

#include <json.hpp>

#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <stdexcept>

namespace wigkit {

namespace {

// %.17g round-trips doubles and keeps output byte-stable across runs.
std::string fmt_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

nlohmann::json grid_header(const WignerField& f, const std::string& format,
                           const std::string& data_name) {
    nlohmann::json j;
    j["format"] = format;
    j["dim"] = f.grid.dim();
    j["points_per_axis"] = f.grid.points_per_axis();
    j["half_width"] = f.grid.half_width();
    std::vector<double> c(f.grid.center().data(),
                          f.grid.center().data() + f.grid.dim());
    j["center"] = c;
    j["modes"] = f.modes;
    j["order"] = "row-major, axis 0 slowest";
    j["data_file"] = data_name;
    return j;
}

}  // namespace

FieldFiles save_field(const WignerField& f, const std::string& base_path,
                      FieldFormat format) {
    namespace fs = std::filesystem;
    FieldFiles out;
    out.header_path = base_path + ".json";
    const std::string ext = format == FieldFormat::csv ? ".csv" : ".f64";
    out.data_path = base_path + ext;

    if (format == FieldFormat::csv) {
        std::ofstream data(out.data_path, std::ios::binary);
        if (!data) throw std::runtime_error("save_field: cannot open " + out.data_path);
        for (int a = 0; a < f.grid.dim(); ++a) data << "x" << a << ",";
        data << "value\n";
        std::vector<int> idx(f.grid.dim());
        for (std::size_t i = 0; i < f.values.size(); ++i) {
            f.grid.unravel(i, idx);
            for (int a = 0; a < f.grid.dim(); ++a)
                data << fmt_double(f.grid.axis_coord(a, idx[a])) << ",";
            data << fmt_double(f.values[i]) << "\n";
        }
    } else {
        std::ofstream data(out.data_path, std::ios::binary);
        if (!data) throw std::runtime_error("save_field: cannot open " + out.data_path);
        static_assert(sizeof(double) == 8);
        data.write(reinterpret_cast<const char*>(f.values.data()),
                   static_cast<std::streamsize>(f.values.size() * sizeof(double)));
    }

    nlohmann::json header = grid_header(
        f, format == FieldFormat::csv ? "csv" : "f64le",
        fs::path(out.data_path).filename().string());
    std::ofstream hdr(out.header_path, std::ios::binary);
    if (!hdr) throw std::runtime_error("save_field: cannot open " + out.header_path);
    hdr << header.dump(2) << "\n";
    return out;
}

WignerField load_field(const std::string& header_path) {
    namespace fs = std::filesystem;
    std::ifstream hdr(header_path);
    if (!hdr) throw std::runtime_error("load_field: cannot open " + header_path);
    nlohmann::json j = nlohmann::json::parse(hdr);

    const int dim = j.at("dim").get<int>();
    const int n = j.at("points_per_axis").get<int>();
    const double half_width = j.at("half_width").get<double>();
    std::vector<double> cvec = j.at("center").get<std::vector<double>>();
    if (static_cast<int>(cvec.size()) != dim)
        throw std::runtime_error("load_field: center length mismatch");
    PhasePoint center(dim);
    for (int a = 0; a < dim; ++a) center[a] = cvec[a];
    PhaseGrid grid(dim, half_width, n, center);

    const std::string format = j.at("format").get<std::string>();
    const std::string data_path =
        (fs::path(header_path).parent_path() / j.at("data_file").get<std::string>())
            .string();

    std::vector<double> values;
    values.reserve(grid.size());
    if (format == "csv") {
        std::ifstream data(data_path);
        if (!data) throw std::runtime_error("load_field: cannot open " + data_path);
        std::string line;
        std::getline(data, line);  // header row
        while (std::getline(data, line)) {
            if (line.empty()) continue;
            const auto last_comma = line.find_last_of(',');
            if (last_comma == std::string::npos)
                throw std::runtime_error("load_field: malformed CSV row");
            values.push_back(std::stod(line.substr(last_comma + 1)));
        }
    } else if (format == "f64le") {
        std::ifstream data(data_path, std::ios::binary);
        if (!data) throw std::runtime_error("load_field: cannot open " + data_path);
        values.resize(grid.size());
        data.read(reinterpret_cast<char*>(values.data()),
                  static_cast<std::streamsize>(values.size() * sizeof(double)));
        if (!data) throw std::runtime_error("load_field: short read on " + data_path);
    } else {
        throw std::runtime_error("load_field: unknown format " + format);
    }

    if (values.size() != grid.size())
        throw std::runtime_error("load_field: value count does not match grid");
    WignerField f(grid, std::move(values));
    f.modes = j.at("modes").get<int>();
    return f;
}

}  // namespace wigkit
