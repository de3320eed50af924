#pragma once

#include "marginlab/core/dataset.hpp"

#include <filesystem>
#include <istream>

namespace marginlab {

// One example per line: d feature columns then one label column, comma
// separated. A first row containing any non-numeric cell is treated as a
// header. Throws ParseError (with the 1-based line number) on ragged rows,
// non-numeric cells or binary labels outside {-1, +1}.
Dataset load_csv(const std::filesystem::path& path, LabelKind kind);
Dataset parse_csv(std::istream& in, LabelKind kind);

}  // namespace marginlab
