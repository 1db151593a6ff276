#include "rtsched/lp_export.hpp"

#include <sstream>

namespace rtsched {

namespace {

constexpr int kTermsPerLine = 8;

std::string var_name(const FullModel& m, VarIndex v) {
  const VarKey k = m.key(v);
  return "x_" + std::to_string(k.linac + 1) + '_' + std::to_string(k.patient + 1) + '_' +
         std::to_string(k.day) + '_' + std::to_string(k.session);
}

class RowWriter {
 public:
  RowWriter(std::ostream& os, const FullModel& m, const std::string& label) : os_(os), m_(m) {
    os_ << ' ' << label << ':';
  }

  void term(std::int64_t coef, VarIndex v) {
    if (count_ > 0 && count_ % kTermsPerLine == 0) os_ << "\n   ";
    if (coef < 0) {
      os_ << " -";
      coef = -coef;
    } else if (count_ > 0) {
      os_ << " +";
    }
    os_ << ' ';
    if (coef != 1) os_ << coef << ' ';
    os_ << var_name(m_, v);
    ++count_;
  }

  void end(const char* sense, std::int64_t rhs) { os_ << ' ' << sense << ' ' << rhs << '\n'; }
  void end() { os_ << '\n'; }

 private:
  std::ostream& os_;
  const FullModel& m_;
  int count_ = 0;
};

}  // namespace

std::string export_lp(const FullModel& m, Objective objective) {
  std::ostringstream os;
  os << "\\ radiotherapy batch: " << m.num_patients() << " patients, " << m.num_linacs()
     << " linacs, T=" << m.horizon_length() << ", first day " << m.horizon().first << '\n';
  os << "\\ objective f" << static_cast<int>(objective) << " (" << to_string(objective) << ")\n";
  os << "Minimize\n";
  {
    RowWriter obj(os, m, "obj");
    for (const auto& t : m.objective(objective)) obj.term(t.coef, t.var);
    obj.end();
  }

  os << "Subject To\n";
  for (std::size_t j = 0; j < m.num_patients(); ++j) {
    for (int l = 1; l <= m.num_sessions(j); ++l) {
      RowWriter row(os, m, "assign_" + std::to_string(j + 1) + '_' + std::to_string(l));
      for (VarIndex v : m.assignment_row(j, l)) row.term(1, v);
      row.end("=", 1);
    }
  }
  for (const auto& link : m.links()) {
    RowWriter row(os, m, "link" + var_name(m, link.from).substr(1));
    row.term(1, link.from);
    row.term(-1, link.to);
    row.end("=", 0);
  }
  if (m.num_patients() > 0) {
    for (std::size_t i = 0; i < m.num_linacs(); ++i) {
      for (int k = 1; k <= m.horizon_length(); ++k) {
        RowWriter row(os, m, "cap_" + std::to_string(i + 1) + '_' + std::to_string(k));
        for (const auto& t : m.capacity_terms(i, k)) row.term(t.coef, t.var);
        row.end("<=", m.capacity_rhs(i, k));
      }
    }
  }

  os << "Bounds\n";
  for (VarIndex v = 0; v < m.num_variables(); ++v) {
    if (m.is_fixed(v)) os << ' ' << var_name(m, v) << " = 0\n";
  }
  os << "Binaries\n";
  for (VarIndex v = 0; v < m.num_variables(); ++v) os << ' ' << var_name(m, v) << '\n';
  os << "End\n";
  return os.str();
}

}  // namespace rtsched
