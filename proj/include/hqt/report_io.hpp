#pragma once

#include <string>

#include "hqt/analytics.hpp"
#include "hqt/protocols.hpp"

namespace hqt::io {

// Engine-vs-engine audit across a set of seeded random qubits.
struct VerifyReport {
  double alpha2 = 0.0;
  std::uint64_t seed = 0;
  int qubits = 0;
  double tol = 1e-8;
  double max_dev_cv2dv = 0.0;
  double max_dev_dv2cv = 0.0;
  bool pass = true;
};

// All numbers below are rendered with 15 significant digits so identical
// requests yield byte-identical artifacts.
std::string format_number(double v);

std::string to_json(const ProtocolReport& report);
std::string to_csv(const ProtocolReport& report);

std::string to_json(const MonteCarloReport& report);
std::string to_csv(const MonteCarloReport& report);

std::string to_json(const analytics::SweepTable& table, std::uint64_t seed);
std::string to_csv(const analytics::SweepTable& table);

std::string to_json(const VerifyReport& report);
std::string to_csv(const VerifyReport& report);

std::string human_summary(const ProtocolReport& report);
std::string human_summary(const MonteCarloReport& report);
std::string human_summary(const analytics::SweepTable& table);
std::string human_summary(const VerifyReport& report);

}  // namespace hqt::io
