#pragma once

#include <string>
#include <vector>

#include "setadam/trace.hpp"

namespace setadam {

// Shortest decimal representation that round-trips the value exactly.
std::string format_real(real value);

// trace.csv: iter,epoch,layer,mean_alpha,std_alpha,min_alpha,max_alpha,gamma,angle_deg
std::string trace_to_csv(const StepsizeTrace& trace);
void write_trace_csv(const std::string& path, const StepsizeTrace& trace);

// range.csv: iter,epoch,ratio,cv,global_min_alpha,global_max_alpha
std::string range_to_csv(const std::vector<RangeSummary>& series);
void write_range_csv(const std::string& path, const std::vector<RangeSummary>& series);

void write_text_file(const std::string& path, const std::string& content);
std::string read_text_file(const std::string& path);

}  // namespace setadam
