#pragma once

#include <string>
#include <vector>

#include "glmf/matrix.hpp"

namespace glmf::csv {

// Plain numeric CSV, no header; %.17g preserves doubles exactly.
void write_matrix(const std::string& path, const Matrix& m, int precision = 17);
Matrix read_matrix(const std::string& path);

void write_mask(const std::string& path, const Mask& m);
Mask read_mask(const std::string& path);

// Header + rows of preformatted fields.
void write_table(const std::string& path, const std::vector<std::string>& header,
                 const std::vector<std::vector<std::string>>& rows);

// Whole-file read split into trimmed fields; skips blank lines.
std::vector<std::vector<std::string>> read_rows(const std::string& path);

std::string format_double(double v, int precision = 17);

}  // namespace glmf::csv
