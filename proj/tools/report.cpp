#include "report.hpp"

#include <cstdio>
#include <sstream>

#include "jetinv/parser.hpp"

namespace jetinv::cli {

namespace {

std::string number(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

Json invariant_json(const InvariantVerdict &v) {
  if (!v.defined) {
    Json j;
    j["status"] = "undefined";
    j["note"] = v.note;
    return j;
  }
  Json j = verdict_json(v.verdict);
  if (!v.note.empty()) {
    j["note"] = v.note;
  }
  return j;
}

std::string verdict_line(const ZeroVerdict &v) {
  std::string out(to_string(v.status));
  if (v.status == ZeroVerdict::Status::NumericallyZero) {
    out += "  max |value| " + number(v.max_abs) + " over " +
           std::to_string(v.samples) + " samples";
  }
  if (v.witness) {
    out += "  witness " + point_string(*v.witness) + " value " +
           number(v.witness_value);
  }
  return out;
}

std::string invariant_line(const InvariantVerdict &v) {
  if (!v.defined) {
    return "undefined (" + v.note + ")";
  }
  std::string out = verdict_line(v.verdict);
  if (!v.note.empty()) {
    out += "  [" + v.note + "]";
  }
  return out;
}

} // namespace

std::string point_string(const JetPoint &p) {
  std::string out = "(";
  for (int i = 0; i < 4; ++i) {
    out += (i ? ", " : "") + p.coords[i].get_str();
  }
  return out + ")";
}

Json point_json(const JetPoint &p) {
  Json j = Json::array();
  for (const auto &c : p.coords) {
    j.push_back(c.get_str());
  }
  return j;
}

Json verdict_json(const ZeroVerdict &v) {
  Json j;
  j["status"] = std::string(to_string(v.status));
  if (v.status != ZeroVerdict::Status::SymbolicZero) {
    j["max_abs"] = v.max_abs;
    j["samples"] = v.samples;
  }
  if (v.witness) {
    j["witness"] = point_json(*v.witness);
    j["witness_value"] = v.witness_value;
  }
  return j;
}

Json plan_json(const SamplePlan &plan) {
  Json j;
  j["seed"] = plan.seed;
  j["samples"] = plan.count;
  j["tol"] = plan.tolerance;
  Json box = Json::array();
  for (const auto &[lo, hi] : plan.box) {
    box.push_back(Json::array({lo.get_str(), hi.get_str()}));
  }
  j["box"] = box;
  j["margin"] = plan.margin;
  return j;
}

Json report_json(const InvariantReport &r) {
  Json j;
  j["equation"] = render(r.rhs);
  Json v;
  v["W"] = invariant_json(r.w);
  v["C"] = invariant_json(r.c);
  v["K0"] = invariant_json(r.k0);
  v["K1"] = invariant_json(r.k1);
  v["I"] = invariant_json(r.i);
  v["J"] = invariant_json(r.j);
  v["J"]["valid"] = r.j_valid;
  j["verdicts"] = v;
  j["classification"] = std::string(to_string(r.classification));
  j["plan"] = plan_json(r.plan);
  Json res = Json::array();
  Json d3;
  d3["name"] = "d^3F/dx2^3";
  d3.update(invariant_json(r.third_derivative));
  res.push_back(d3);
  for (const auto &x : r.residuals) {
    Json e;
    e["name"] = x.name;
    e.update(verdict_json(x.verdict));
    res.push_back(e);
  }
  if (r.cartan_consistent) {
    Json e;
    e["name"] = "C vanishes when W = I = J = 0";
    e["status"] = *r.cartan_consistent ? "pass" : "fail";
    res.push_back(e);
  }
  j["residuals"] = res;
  return j;
}

std::string report_text(const InvariantReport &r) {
  std::ostringstream out;
  out << "equation        x''' = " << render(r.rhs) << "\n";
  out << "plan            samples " << r.plan.count << ", seed "
      << r.plan.seed << ", tol " << number(r.plan.tolerance) << ", margin "
      << number(r.plan.margin) << ", box";
  for (const auto &[lo, hi] : r.plan.box) {
    out << " [" << lo.get_str() << ", " << hi.get_str() << "]";
  }
  out << "\n";
  out << "d^3F/dx2^3      " << invariant_line(r.third_derivative) << "\n";
  out << "W               " << invariant_line(r.w) << "\n";
  out << "C               " << invariant_line(r.c) << "\n";
  out << "K0              " << invariant_line(r.k0) << "\n";
  out << "K1              " << invariant_line(r.k1) << "\n";
  out << "I               " << invariant_line(r.i) << "\n";
  out << "J               " << invariant_line(r.j)
      << (r.j_valid ? "" : "  (invalid)") << "\n";
  out << "classification  " << to_string(r.classification) << "\n";
  out << "identities\n";
  for (const auto &x : r.residuals) {
    out << "  " << x.name << ": " << verdict_line(x.verdict) << "\n";
  }
  if (r.cartan_consistent) {
    out << "  C vanishes when W = I = J = 0: "
        << (*r.cartan_consistent ? "pass" : "fail") << "\n";
  }
  return out.str();
}

Json check_json(const InvarianceCheck &c, const std::string &map_name) {
  Json j;
  j["rule"] = std::string(to_string(c.rule));
  j["map"] = map_name;
  j["equation"] = render(c.equation.rhs());
  j["passed"] = c.passed;
  j["symbolic"] = c.symbolic;
  j["tol"] = c.tolerance;
  j["samples"] = c.residuals.size();
  if (c.worst) {
    j["worst"] = {{"point", point_json(c.worst->point)},
                  {"residual", c.worst->residual}};
  }
  return j;
}

std::string check_text(const InvarianceCheck &c, const std::string &map_name) {
  std::ostringstream out;
  out << (c.passed ? "PASS " : "FAIL ") << to_string(c.rule) << " [" << map_name
      << "] x''' = " << render(c.equation.rhs());
  if (c.symbolic) {
    out << "  symbolic";
  } else if (c.worst) {
    out << "  worst " << number(c.worst->residual) << " at "
        << point_string(c.worst->point);
  }
  return out.str();
}

} // namespace jetinv::cli
