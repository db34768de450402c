#include "floormatch/harness/artifacts.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

namespace floormatch::harness {

namespace {

std::string fmt(double v, const char* spec = "%.4f") {
  char buf[64];
  std::snprintf(buf, sizeof(buf), spec, v);
  return buf;
}

std::ofstream open_out(const std::string& path) {
  std::ofstream os(path);
  if (!os) throw ConfigError("cannot open for writing: " + path);
  return os;
}

}  // namespace

void write_loss_curve_csv(const std::string& path, uint64_t seed,
                          const std::vector<float>& epoch_loss) {
  auto os = open_out(path);
  os << "# seed=" << seed << "\n";
  os << "epoch,mean_loss\n";
  for (size_t i = 0; i < epoch_loss.size(); ++i)
    os << (i + 1) << "," << fmt(epoch_loss[i], "%.6f") << "\n";
}

void write_metrics_csv(const std::string& path, uint64_t seed,
                       const std::vector<EvalReport>& rows) {
  auto os = open_out(path);
  os << "# seed=" << seed << "\n";
  size_t groups = rows.empty() ? 5 : rows.front().group_accuracies.size();
  os << "problem,accuracy_mean,accuracy_std,chance,num_samples";
  for (size_t g = 1; g <= groups; ++g) os << ",group" << g;
  os << "\n";
  for (const EvalReport& r : rows) {
    os << r.problem << "," << fmt(r.accuracy_mean) << "," << fmt(r.accuracy_std) << ","
       << fmt(r.chance) << "," << r.num_samples;
    for (double g : r.group_accuracies) os << "," << fmt(g);
    os << "\n";
  }
}

std::string format_mean_std(const EvalReport& report) {
  return fmt(report.accuracy_mean, "%.2f") + " +- " + fmt(report.accuracy_std, "%.2f");
}

void write_table_txt(const std::string& path, uint64_t seed, const std::string& title,
                     const std::vector<std::string>& col_headers,
                     const std::vector<std::string>& row_headers,
                     const std::vector<std::vector<std::string>>& cells) {
  auto os = open_out(path);
  os << "# seed=" << seed << "\n";
  os << title << "\n";
  size_t label_w = 0;
  for (const auto& r : row_headers) label_w = std::max(label_w, r.size());
  std::vector<size_t> col_w(col_headers.size());
  for (size_t c = 0; c < col_headers.size(); ++c) {
    col_w[c] = col_headers[c].size();
    for (const auto& row : cells)
      if (c < row.size()) col_w[c] = std::max(col_w[c], row[c].size());
  }
  auto pad = [&os](const std::string& s, size_t w) {
    os << s;
    for (size_t i = s.size(); i < w + 2; ++i) os << ' ';
  };
  pad("", label_w);
  for (size_t c = 0; c < col_headers.size(); ++c) pad(col_headers[c], col_w[c]);
  os << "\n";
  for (size_t r = 0; r < row_headers.size(); ++r) {
    pad(row_headers[r], label_w);
    for (size_t c = 0; c < cells[r].size(); ++c) pad(cells[r][c], col_w[c]);
    os << "\n";
  }
}

std::string read_text_file(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw ConfigError("cannot open: " + path);
  std::ostringstream ss;
  ss << is.rdbuf();
  return ss.str();
}

}  // namespace floormatch::harness
