#pragma once

#include "cascade/scenarios.hpp"

#include <string>
#include <vector>

namespace cascade {

/// Locale-independent, 12 significant digits.
std::string format_number(double v);

/// Header: pump_rate,system,mean_n,g2,...,g{n_max},cutoff_s,cutoff_t,converged
/// Rows sorted by (pump_rate, system); byte-deterministic.
void emit_records(const std::vector<CorrelationRecord>& records, int n_max,
                  const std::string& path);

/// Transition diagnostic: pump,source_g2dd,target_g2dd.
void emit_transition(const std::vector<CorrelationRecord>& source_records,
                     const std::vector<CorrelationRecord>& target_records,
                     const std::string& path);

/// Generic helper for the remaining figure-data files.
void write_table(const std::string& path,
                 const std::vector<std::string>& header,
                 const std::vector<std::vector<std::string>>& rows);

void write_text_file(const std::string& path, const std::string& content);

}  // namespace cascade
