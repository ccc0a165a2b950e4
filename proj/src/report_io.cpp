#include "hqt/report_io.hpp"

#include <cstdio>
#include <sstream>

namespace hqt::io {

namespace {

std::string num(double v) { return format_number(v); }

std::string json_mode_list(const std::vector<int>& modes) {
  std::string out = "[";
  for (std::size_t i = 0; i < modes.size(); ++i) {
    if (i) out += ",";
    out += std::to_string(modes[i]);
  }
  return out + "]";
}

void emit_branches_json(std::ostringstream& os, const ProtocolReport& r) {
  os << "\"branches\":[";
  for (std::size_t i = 0; i < r.branches.size(); ++i) {
    const auto& b = r.branches[i];
    if (i) os << ",";
    os << "{\"case\":\"" << to_string(b.label) << "\",\"probability\":" << num(b.probability)
       << ",\"fidelity\":" << num(b.fidelity) << ",\"correction\":\"" << to_string(b.correction)
       << "\"}";
  }
  os << "]";
}

}  // namespace

std::string format_number(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.15g", v);
  return buf;
}

std::string to_json(const ProtocolReport& r) {
  std::ostringstream os;
  os << "{\"protocol\":\"" << to_string(r.direction) << "\"";
  os << ",\"alpha2\":" << num(r.alpha2);
  os << ",\"qubit\":{\"theta\":" << num(r.qubit.theta) << ",\"phi\":" << num(r.qubit.phi) << "}";
  os << ",\"delta\":{\"re\":" << num(r.delta.real()) << ",\"im\":" << num(r.delta.imag()) << "}";
  os << ",\"x2\":" << num(r.x2) << ",";
  emit_branches_json(os, r);
  os << ",\"f_avg\":" << num(r.f_avg);
  os << ",\"reconciliation\":[";
  for (std::size_t i = 0; i < r.reconciliation.size(); ++i) {
    const auto& c = r.reconciliation[i];
    if (i) os << ",";
    os << "{\"formula_id\":\"" << c.formula_id << "\",\"value_formula\":" << num(c.value_formula)
       << ",\"value_oracle\":" << num(c.value_oracle) << ",\"abs_dev\":" << num(c.abs_dev) << "}";
  }
  os << "],\"wiring\":[";
  for (std::size_t i = 0; i < r.wiring.size(); ++i) {
    const auto& w = r.wiring[i];
    if (i) os << ",";
    os << "{\"element\":\"" << w.element << "\",\"in\":" << json_mode_list(w.in_modes)
       << ",\"out\":" << json_mode_list(w.out_modes) << "}";
  }
  os << "],\"engine\":{\"cutoffs\":[";
  for (std::size_t i = 0; i < r.engine.cutoffs.size(); ++i) {
    if (i) os << ",";
    os << "{\"mode\":" << r.engine.cutoffs[i].first << ",\"cutoff\":" << r.engine.cutoffs[i].second
       << "}";
  }
  os << "],\"max_crosscheck_dev\":" << num(r.engine.max_crosscheck_dev) << "}";
  os << ",\"seed\":" << r.seed << "}\n";
  return os.str();
}

std::string to_csv(const ProtocolReport& r) {
  std::ostringstream os;
  os << "field,value\n";
  os << "protocol," << to_string(r.direction) << "\n";
  os << "alpha2," << num(r.alpha2) << "\n";
  os << "theta," << num(r.qubit.theta) << "\n";
  os << "phi," << num(r.qubit.phi) << "\n";
  os << "delta_re," << num(r.delta.real()) << "\n";
  os << "delta_im," << num(r.delta.imag()) << "\n";
  os << "x2," << num(r.x2) << "\n";
  os << "f_avg," << num(r.f_avg) << "\n";
  os << "max_crosscheck_dev," << num(r.engine.max_crosscheck_dev) << "\n";
  os << "seed," << r.seed << "\n";
  os << "\ncase,probability,fidelity,correction\n";
  for (const auto& b : r.branches)
    os << to_string(b.label) << "," << num(b.probability) << "," << num(b.fidelity) << ","
       << to_string(b.correction) << "\n";
  os << "\nformula_id,value_formula,value_oracle,abs_dev\n";
  for (const auto& c : r.reconciliation)
    os << c.formula_id << "," << num(c.value_formula) << "," << num(c.value_oracle) << ","
       << num(c.abs_dev) << "\n";
  return os.str();
}

std::string to_json(const MonteCarloReport& r) {
  std::ostringstream os;
  os << "{\"protocol\":\"sample\",\"direction\":\"" << to_string(r.direction) << "\"";
  os << ",\"alpha2\":" << num(r.alpha2);
  os << ",\"qubit\":{\"theta\":" << num(r.qubit.theta) << ",\"phi\":" << num(r.qubit.phi) << "}";
  os << ",\"trials\":" << r.trials << ",\"seed\":" << r.seed;
  os << ",\"branches\":[";
  for (std::size_t i = 0; i < r.branches.size(); ++i) {
    const auto& b = r.branches[i];
    if (i) os << ",";
    os << "{\"case\":\"" << to_string(b.label) << "\",\"count\":" << b.count
       << ",\"frequency\":" << num(b.frequency)
       << ",\"exact_probability\":" << num(b.exact_probability)
       << ",\"fidelity\":" << num(b.fidelity) << "}";
  }
  os << "],\"mean_fidelity\":" << num(r.mean_fidelity);
  os << ",\"exact_f_avg\":" << num(r.exact_f_avg) << "}\n";
  return os.str();
}

std::string to_csv(const MonteCarloReport& r) {
  std::ostringstream os;
  os << "field,value\n";
  os << "protocol,sample\n";
  os << "direction," << to_string(r.direction) << "\n";
  os << "alpha2," << num(r.alpha2) << "\n";
  os << "theta," << num(r.qubit.theta) << "\n";
  os << "phi," << num(r.qubit.phi) << "\n";
  os << "trials," << r.trials << "\n";
  os << "seed," << r.seed << "\n";
  os << "mean_fidelity," << num(r.mean_fidelity) << "\n";
  os << "exact_f_avg," << num(r.exact_f_avg) << "\n";
  os << "\ncase,count,frequency,exact_probability,fidelity\n";
  for (const auto& b : r.branches)
    os << to_string(b.label) << "," << b.count << "," << num(b.frequency) << ","
       << num(b.exact_probability) << "," << num(b.fidelity) << "\n";
  return os.str();
}

std::string to_json(const analytics::SweepTable& t, std::uint64_t seed) {
  std::ostringstream os;
  os << "{\"protocol\":\"sweep\",\"bloch_avg\":true,\"rows\":[";
  for (std::size_t i = 0; i < t.rows.size(); ++i) {
    const auto& row = t.rows[i];
    if (i) os << ",";
    os << "{\"alpha2\":" << num(row.alpha2) << ",\"x2\":" << num(row.x2)
       << ",\"delta_abs2\":" << num(row.delta_abs2)
       << ",\"fbar_formula_eq21\":" << num(row.fbar_formula)
       << ",\"fbar_oracle\":" << num(row.fbar_oracle) << ",\"abs_dev\":" << num(row.abs_dev)
       << "}";
  }
  os << "],\"seed\":" << seed << "}\n";
  return os.str();
}

std::string to_csv(const analytics::SweepTable& t) {
  std::ostringstream os;
  os << "alpha2,x2,delta_abs2,fbar_formula_eq21,fbar_oracle,abs_dev\n";
  for (const auto& row : t.rows)
    os << num(row.alpha2) << "," << num(row.x2) << "," << num(row.delta_abs2) << ","
       << num(row.fbar_formula) << "," << num(row.fbar_oracle) << "," << num(row.abs_dev) << "\n";
  return os.str();
}

std::string to_json(const VerifyReport& r) {
  std::ostringstream os;
  os << "{\"protocol\":\"verify\",\"alpha2\":" << num(r.alpha2) << ",\"seed\":" << r.seed
     << ",\"qubits\":" << r.qubits << ",\"tol\":" << num(r.tol)
     << ",\"max_dev_cv2dv\":" << num(r.max_dev_cv2dv)
     << ",\"max_dev_dv2cv\":" << num(r.max_dev_dv2cv)
     << ",\"pass\":" << (r.pass ? "true" : "false") << "}\n";
  return os.str();
}

std::string to_csv(const VerifyReport& r) {
  std::ostringstream os;
  os << "field,value\n";
  os << "protocol,verify\n";
  os << "alpha2," << num(r.alpha2) << "\n";
  os << "seed," << r.seed << "\n";
  os << "qubits," << r.qubits << "\n";
  os << "tol," << num(r.tol) << "\n";
  os << "max_dev_cv2dv," << num(r.max_dev_cv2dv) << "\n";
  os << "max_dev_dv2cv," << num(r.max_dev_dv2cv) << "\n";
  os << "pass," << (r.pass ? "true" : "false") << "\n";
  return os.str();
}

std::string human_summary(const ProtocolReport& r) {
  std::ostringstream os;
  os << to_string(r.direction) << " run: alpha2=" << num(r.alpha2)
     << " theta=" << num(r.qubit.theta) << " phi=" << num(r.qubit.phi) << "\n";
  if (r.direction == Direction::Dv2Cv)
    os << "  delta = " << num(r.delta.real()) << " + " << num(r.delta.imag()) << "i\n";
  os << "  case  probability        fidelity           correction\n";
  for (const auto& b : r.branches) {
    char line[160];
    std::snprintf(line, sizeof(line), "  %-4s  %-17.12g  %-17.12g  %s\n",
                  to_string(b.label).c_str(), b.probability, b.fidelity,
                  to_string(b.correction).c_str());
    os << line;
  }
  os << "  f_avg = " << num(r.f_avg) << "\n";
  if (r.engine.crosscheck_run)
    os << "  engine max crosscheck deviation = " << num(r.engine.max_crosscheck_dev) << "\n";
  os << "  wiring:";
  for (const auto& w : r.wiring) {
    os << " " << w.element << "(";
    for (std::size_t i = 0; i < w.in_modes.size(); ++i)
      os << (i ? "," : "") << w.in_modes[i];
    os << "->";
    for (std::size_t i = 0; i < w.out_modes.size(); ++i)
      os << (i ? "," : "") << w.out_modes[i];
    os << ")";
  }
  os << "\n";
  return os.str();
}

std::string human_summary(const MonteCarloReport& r) {
  std::ostringstream os;
  os << "sample run (" << to_string(r.direction) << "): alpha2=" << num(r.alpha2)
     << " trials=" << r.trials << " seed=" << r.seed << "\n";
  os << "  case  count      frequency      exact_probability\n";
  for (const auto& b : r.branches) {
    char line[160];
    std::snprintf(line, sizeof(line), "  %-4s  %-9llu  %-13.8g  %-13.8g\n",
                  to_string(b.label).c_str(), static_cast<unsigned long long>(b.count),
                  b.frequency, b.exact_probability);
    os << line;
  }
  os << "  mean fidelity = " << num(r.mean_fidelity) << " (exact " << num(r.exact_f_avg) << ")\n";
  return os.str();
}

std::string human_summary(const analytics::SweepTable& t) {
  std::ostringstream os;
  os << "sweep over " << t.rows.size() << " grid points (Bloch-averaged fidelity)\n";
  os << "  alpha2     fbar_formula_eq21  fbar_oracle        abs_dev\n";
  for (const auto& row : t.rows) {
    char line[160];
    std::snprintf(line, sizeof(line), "  %-9.4g  %-17.12g  %-17.12g  %.3e\n", row.alpha2,
                  row.fbar_formula, row.fbar_oracle, row.abs_dev);
    os << line;
  }
  return os.str();
}

std::string human_summary(const VerifyReport& r) {
  std::ostringstream os;
  os << "verify at alpha2=" << num(r.alpha2) << " over " << r.qubits
     << " random qubits (seed " << r.seed << ")\n";
  os << "  max deviation cv2dv = " << num(r.max_dev_cv2dv) << "\n";
  os << "  max deviation dv2cv = " << num(r.max_dev_dv2cv) << "\n";
  os << "  tolerance " << num(r.tol) << " -> " << (r.pass ? "PASS" : "FAIL") << "\n";
  return os.str();
}

}  // namespace hqt::io
