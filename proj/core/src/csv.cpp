#include "setadam/csv.hpp"

#include <charconv>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <system_error>

namespace setadam {

std::string format_real(real value) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), value);
  if (ec != std::errc()) {
    throw std::runtime_error("format_real: conversion failed");
  }
  return std::string(buf, ptr);
}

std::string trace_to_csv(const StepsizeTrace& trace) {
  std::string out = "iter,epoch,layer,mean_alpha,std_alpha,min_alpha,max_alpha,gamma,angle_deg\n";
  for (const StepsizeRecord& r : trace) {
    out += std::to_string(r.iter);
    out += ',';
    out += std::to_string(r.epoch);
    out += ',';
    out += std::to_string(r.layer);
    out += ',';
    out += format_real(r.mean_alpha);
    out += ',';
    out += format_real(r.std_alpha);
    out += ',';
    out += format_real(r.min_alpha);
    out += ',';
    out += format_real(r.max_alpha);
    out += ',';
    out += format_real(r.gamma);
    out += ',';
    out += format_real(r.angle_deg);
    out += '\n';
  }
  return out;
}

std::string range_to_csv(const std::vector<RangeSummary>& series) {
  std::string out = "iter,epoch,ratio,cv,global_min_alpha,global_max_alpha\n";
  for (const RangeSummary& r : series) {
    out += std::to_string(r.iter);
    out += ',';
    out += std::to_string(r.epoch);
    out += ',';
    out += format_real(r.ratio);
    out += ',';
    out += format_real(r.cv);
    out += ',';
    out += format_real(r.global_min_alpha);
    out += ',';
    out += format_real(r.global_max_alpha);
    out += '\n';
  }
  return out;
}

void write_text_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) {
    throw std::runtime_error("cannot open '" + path + "' for writing");
  }
  out << content;
  if (!out) {
    throw std::runtime_error("write to '" + path + "' failed");
  }
}

std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw std::runtime_error("cannot open '" + path + "'");
  }
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_trace_csv(const std::string& path, const StepsizeTrace& trace) {
  write_text_file(path, trace_to_csv(trace));
}

void write_range_csv(const std::string& path, const std::vector<RangeSummary>& series) {
  write_text_file(path, range_to_csv(series));
}

}  // namespace setadam
