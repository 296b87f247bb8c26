#include "fracspde/common.hpp"

#include <iostream>
#include <mutex>
#include <set>

namespace fracspde {

namespace {

std::mutex sink_mutex;

WarningSink &sink() {
  // Monte Carlo loops raise the same diagnostic once per path; print it once.
  static WarningSink s = [](const std::string &m) {
    static std::set<std::string> seen;
    if (seen.insert(m).second) std::cerr << "warning: " << m << '\n';
  };
  return s;
}

}  // namespace

void set_warning_sink(WarningSink s) {
  std::lock_guard<std::mutex> lock(sink_mutex);
  sink() = s ? std::move(s) : [](const std::string &) {};
}

void warn(const std::string &message) {
  std::lock_guard<std::mutex> lock(sink_mutex);
  sink()(message);
}

}  // namespace fracspde
