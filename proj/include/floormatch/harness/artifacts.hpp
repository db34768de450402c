#pragma once

#include <string>
#include <vector>

#include "floormatch/harness/eval.hpp"

namespace floormatch::harness {

// Every CSV artifact starts with a "# seed=<effective seed>" header line and
// uses fixed-precision formatting, so identical runs produce identical bytes.

void write_loss_curve_csv(const std::string& path, uint64_t seed,
                          const std::vector<float>& epoch_loss);

void write_metrics_csv(const std::string& path, uint64_t seed,
                       const std::vector<EvalReport>& rows);

std::string format_mean_std(const EvalReport& report);  // "85.30 ± 3.40"

// aligned-text table, one row label column plus one column per header
void write_table_txt(const std::string& path, uint64_t seed, const std::string& title,
                     const std::vector<std::string>& col_headers,
                     const std::vector<std::string>& row_headers,
                     const std::vector<std::vector<std::string>>& cells);

std::string read_text_file(const std::string& path);

}  // namespace floormatch::harness
