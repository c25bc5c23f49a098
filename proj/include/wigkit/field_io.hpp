#pragma once

// On-disk form of a WignerField: a small JSON header next to a data file.
// Data is either CSV rows of (coords..., value) with one header line, or flat
// little-endian float64 values. Either way the value order is row-major with
// axis 0 slowest, matching WignerField::values.

#include "wigkit/phase_space.hpp"

#include <string>

namespace wigkit {

enum class FieldFormat { csv, f64le };

struct FieldFiles {
    std::string header_path;
    std::string data_path;
};

// Writes `<base_path>.json` plus `<base_path>.csv` or `<base_path>.f64`.
FieldFiles save_field(const WignerField& f, const std::string& base_path,
                      FieldFormat format);

// Reads a field back from its JSON header path.
WignerField load_field(const std::string& header_path);

}  // namespace wigkit
