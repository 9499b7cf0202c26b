#include "cascade/csv.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <stdexcept>

namespace cascade {

std::string format_number(double v) {
  if (std::isnan(v)) return "nan";
  char buf[48];
  const auto res = std::to_chars(buf, buf + sizeof buf, v,
                                 std::chars_format::general, 12);
  return std::string(buf, res.ptr);
}

void write_text_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open for writing: " + path);
  out << content;
  if (!out) throw std::runtime_error("write failed: " + path);
}

void write_table(const std::string& path,
                 const std::vector<std::string>& header,
                 const std::vector<std::vector<std::string>>& rows) {
  std::string body;
  for (std::size_t i = 0; i < header.size(); ++i) {
    if (i) body += ',';
    body += header[i];
  }
  body += '\n';
  for (const auto& row : rows) {
    if (row.size() != header.size()) {
      throw std::invalid_argument("write_table: row width mismatch");
    }
    for (std::size_t i = 0; i < row.size(); ++i) {
      if (i) body += ',';
      body += row[i];
    }
    body += '\n';
  }
  write_text_file(path, body);
}

void emit_records(const std::vector<CorrelationRecord>& records, int n_max,
                  const std::string& path) {
  if (records.empty()) {
    throw std::invalid_argument("emit_records: no records");
  }
  std::vector<std::string> header{"pump_rate", "system", "mean_n"};
  for (int n = 2; n <= n_max; ++n) header.push_back("g" + std::to_string(n));
  header.insert(header.end(), {"cutoff_s", "cutoff_t", "converged"});

  std::vector<CorrelationRecord> sorted = records;
  std::stable_sort(sorted.begin(), sorted.end(),
                   [](const CorrelationRecord& a, const CorrelationRecord& b) {
                     if (a.pump != b.pump) return a.pump < b.pump;
                     return a.system < b.system;
                   });
  std::vector<std::vector<std::string>> rows;
  for (const CorrelationRecord& r : sorted) {
    if (static_cast<int>(r.g.size()) != n_max - 1) {
      throw std::invalid_argument("emit_records: record order count mismatch");
    }
    std::vector<std::string> row{format_number(r.pump), r.system,
                                 format_number(r.mean_photons)};
    for (double g : r.g) row.push_back(format_number(g));
    row.push_back(std::to_string(r.cutoff_s));
    row.push_back(std::to_string(r.cutoff_t));
    row.push_back(r.converged ? "true" : "false");
    rows.push_back(std::move(row));
  }
  write_table(path, header, rows);
}

void emit_transition(const std::vector<CorrelationRecord>& source_records,
                     const std::vector<CorrelationRecord>& target_records,
                     const std::string& path) {
  if (source_records.size() != target_records.size()) {
    throw std::invalid_argument("emit_transition: grid mismatch");
  }
  std::vector<std::vector<std::string>> rows;
  for (std::size_t i = 0; i < source_records.size(); ++i) {
    const CorrelationRecord& s = source_records[i];
    const CorrelationRecord& t = target_records[i];
    rows.push_back({format_number(s.pump),
                    format_number(s.g_of(3) - 2.0 * s.g_of(2) + 1.0),
                    format_number(t.g_of(3) - 2.0 * t.g_of(2) + 1.0)});
  }
  write_table(path, {"pump", "source_g2dd", "target_g2dd"}, rows);
}

}  // namespace cascade
