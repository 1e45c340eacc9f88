#include "cli.hpp"

#include <algorithm>
#include <functional>
#include <ostream>
#include <sstream>

#include <CLI11.hpp>

#include "jetinv/bigfloat.hpp"
#include "jetinv/errors.hpp"
#include "jetinv/invariants.hpp"
#include "jetinv/parser.hpp"
#include "jetinv/transform.hpp"
#include "report.hpp"

namespace jetinv::cli {

namespace {

constexpr const char *kRadicalEquation =
    "24*x2^3/(-3 + sqrt(9 - 2*x1*x2))^3 + "
    "12*x1*x2^4/(-3 + sqrt(9 - 2*x1*x2))^4";

std::vector<std::string> split(const std::string &s, char sep) {
  std::vector<std::string> out;
  std::string cur;
  std::istringstream in(s);
  while (std::getline(in, cur, sep)) {
    out.push_back(cur);
  }
  return out;
}

Rational constant(const std::string &text, const char *what) {
  const auto c = parse_expression(text).constant_value();
  if (!c) {
    throw InvalidArgument(std::string(what) + " must be a rational constant: '" +
                          text + "'");
  }
  return *c;
}

SamplePlan build_plan(const CliConfig &c) {
  SamplePlan plan;
  if (c.samples) {
    plan.count = *c.samples;
  }
  if (c.seed) {
    plan.seed = *c.seed;
  }
  if (c.tolerance) {
    plan.tolerance = *c.tolerance;
  }
  if (c.box) {
    const auto parts = split(*c.box, ';');
    if (parts.size() != 1 && parts.size() != 4) {
      throw InvalidArgument("--box takes 'lo,hi' or four 'lo,hi' separated by ';'");
    }
    for (int i = 0; i < 4; ++i) {
      const auto ends = split(parts[parts.size() == 1 ? 0 : i], ',');
      if (ends.size() != 2) {
        throw InvalidArgument("malformed --box interval '" + parts[0] + "'");
      }
      plan.box[i] = {constant(ends[0], "box bound"),
                     constant(ends[1], "box bound")};
    }
  }
  plan.validate();
  return plan;
}

JetPoint parse_point(const std::string &text) {
  const auto parts = split(text, ',');
  if (parts.size() != 4) {
    throw InvalidArgument("--point takes four values 't,x0,x1,x2'");
  }
  JetPoint p;
  for (int i = 0; i < 4; ++i) {
    p.coords[i] = constant(parts[i], "point coordinate");
  }
  return p;
}

std::string value_at(const Expr &e, const JetPoint &p) {
  try {
    return eval_exact(e, p).get_str();
  } catch (const NonRationalOperation &) {
    PrecisionScope scope(256);
    std::array<BigFloat, 4> q;
    for (int i = 0; i < 4; ++i) {
      q[i] = BigFloat(p.coords[i]);
    }
    return eval_big(e, q).to_string(30);
  }
}

bool equals_ignoring_case(const std::string &a, const std::string &b) {
  return a.size() == b.size() &&
         std::equal(a.begin(), a.end(), b.begin(), [](char x, char y) {
           return std::tolower(static_cast<unsigned char>(x)) ==
                  std::tolower(static_cast<unsigned char>(y));
         });
}

struct Named {
  const char *name;
  bool needs_psi;
  std::function<Expr(InvariantSet &)> get;
};

const std::vector<Named> &named_invariants() {
  static const std::vector<Named> all{
      {"F", false, [](InvariantSet &s) { return s.equation().rhs(); }},
      {"D3", false, [](InvariantSet &s) { return s.third_derivative(); }},
      {"W", false, [](InvariantSet &s) { return s.w(); }},
      {"C", false, [](InvariantSet &s) { return s.c(); }},
      {"K0", false, [](InvariantSet &s) { return s.k0(); }},
      {"K1", false, [](InvariantSet &s) { return s.k1(); }},
      {"Psi", true, [](InvariantSet &s) { return s.psi(); }},
      {"I1", true, [](InvariantSet &s) { return s.i1(); }},
      {"I2", true, [](InvariantSet &s) { return s.i2(); }},
      {"J0", true, [](InvariantSet &s) { return s.j0(); }},
      {"J1", true, [](InvariantSet &s) { return s.j1(); }},
      {"J2", true, [](InvariantSet &s) { return s.j2(); }},
  };
  return all;
}

int cmd_classify(const CliConfig &c, std::ostream &out) {
  const SamplePlan plan = build_plan(c);
  const InvariantReport r = classify(parse_equation(c.equation), plan);
  if (c.format == Format::Json) {
    out << report_json(r).dump(2) << "\n";
  } else {
    out << report_text(r);
  }
  return kOk;
}

int cmd_invariants(const CliConfig &c, std::ostream &out) {
  InvariantSet s(parse_equation(c.equation));
  const std::optional<JetPoint> point =
      c.point ? std::optional(parse_point(*c.point)) : std::nullopt;

  std::vector<const Named *> chosen;
  for (const auto &name : c.names) {
    auto it = std::find_if(
        named_invariants().begin(), named_invariants().end(),
        [&](const Named &n) { return equals_ignoring_case(n.name, name); });
    if (it == named_invariants().end()) {
      throw InvalidArgument("unknown invariant '" + name +
                            "'; expected one of F, D3, W, C, K0, K1, Psi, "
                            "I1, I2, J0, J1, J2");
    }
    chosen.push_back(&*it);
  }
  const bool explicit_names = !chosen.empty();
  if (!explicit_names) {
    for (const auto &n : named_invariants()) {
      chosen.push_back(&n);
    }
  }

  Json items = Json::array();
  std::ostringstream text;
  for (const Named *n : chosen) {
    Json item;
    item["name"] = n->name;
    if (n->needs_psi && !explicit_names && s.trivializable_symbolically()) {
      item["note"] = "undefined: d^3F/dx2^3 vanishes";
      text << n->name << " undefined (d^3F/dx2^3 vanishes)\n";
      items.push_back(item);
      continue;
    }
    const Expr e = n->get(s);
    item["expr"] = render(e);
    std::string value;
    if (point) {
      value = value_at(e, *point);
      item["value"] = value;
    }
    if (explicit_names && chosen.size() == 1) {
      text << render(e) << "\n";
    } else {
      text << n->name << " = " << render(e) << "\n";
    }
    if (point) {
      text << "  at " << point_string(*point) << ": " << value << "\n";
    }
    items.push_back(item);
  }
  if (c.format == Format::Json) {
    Json j;
    j["equation"] = render(s.equation().rhs());
    if (point) {
      j["point"] = point_json(*point);
    }
    j["invariants"] = items;
    out << j.dump(2) << "\n";
  } else {
    out << text.str();
  }
  return kOk;
}

PointMap build_map(const MapText &m, const SamplePlan &plan) {
  return parse_transformation(m.t_new, m.x_new, m.t_old, m.x_old, plan);
}

int cmd_transform(const CliConfig &c, std::ostream &out) {
  if (!c.map) {
    throw InvalidArgument("transform needs --map-t, --map-x, --inv-t, --inv-x");
  }
  const SamplePlan plan = build_plan(c);
  const PointMap map = build_map(*c.map, plan);
  const Equation eq = parse_equation(c.equation);
  const Equation image = apply(map, eq);
  if (c.format == Format::Json) {
    Json j;
    j["equation"] = render(eq.rhs());
    j["map"] = {{"t", c.map->t_new},
                {"x", c.map->x_new},
                {"inv_t", c.map->t_old},
                {"inv_x", c.map->x_old}};
    j["transformed"] = render(image.rhs());
    j["multiplier"] = render(map.multiplier());
    out << j.dump(2) << "\n";
  } else {
    out << "x~''' = " << render(image.rhs()) << "\n";
    out << "g = " << render(map.multiplier()) << "\n";
  }
  return kOk;
}

int cmd_verify(const CliConfig &c, std::ostream &out) {
  const SamplePlan plan = build_plan(c);
  const Equation eq = parse_equation(c.equation);
  const InvariantReport report = classify(eq, plan);

  std::vector<std::pair<std::string, PointMap>> maps;
  if (c.map) {
    maps.emplace_back("given", build_map(*c.map, plan));
  } else {
    for (const auto &m : fixture_maps()) {
      maps.emplace_back(m.name, m.build(plan));
    }
  }

  bool ok = true;
  Json identities = Json::array();
  std::ostringstream text;
  for (const auto &r : report.residuals) {
    const bool pass = r.verdict.zero();
    ok = ok && pass;
    Json j;
    j["name"] = r.name;
    j["passed"] = pass;
    j.update(verdict_json(r.verdict));
    identities.push_back(j);
    text << (pass ? "PASS " : "FAIL ") << "identity " << r.name << ": "
         << to_string(r.verdict.status) << "\n";
  }

  const bool has_psi = !report.third_derivative.verdict.zero();
  const bool w_zero = report.w.verdict.zero();
  const bool j_applies = has_psi && w_zero && report.i.verdict.zero();
  Json checks = Json::array();
  auto record = [&](const InvarianceCheck &check, const std::string &name) {
    ok = ok && check.passed;
    checks.push_back(check_json(check, name));
    text << check_text(check, name) << "\n";
  };
  for (const auto &[name, map] : maps) {
    record(check_triviality_preservation(map, plan), name);
    record(check_k1_rule(eq, map, plan), name);
    if (w_zero) {
      record(check_w_vanishing(eq, map, plan), name);
    }
    if (has_psi) {
      record(check_form_scaling(eq, map, FormKind::I, plan), name);
    }
    if (j_applies) {
      record(check_form_scaling(eq, map, FormKind::J, plan), name);
    }
  }

  if (c.format == Format::Json) {
    Json j;
    j["equation"] = render(eq.rhs());
    j["plan"] = plan_json(plan);
    j["identities"] = identities;
    j["checks"] = checks;
    j["passed"] = ok;
    out << j.dump(2) << "\n";
  } else {
    out << text.str() << (ok ? "all checks passed" : "some checks failed")
        << "\n";
  }
  return ok ? kOk : kVerificationFailed;
}

int cmd_selftest(const CliConfig &c, std::ostream &out) {
  const SamplePlan plan = build_plan(c);
  struct Case {
    std::string name;
    std::function<std::pair<bool, std::string>()> run;
  };
  auto expect_class = [&](const std::string &src, Classification want) {
    return [&plan, src, want] {
      const auto got = classify(parse_equation(src), plan).classification;
      return std::pair{got == want, std::string(to_string(got))};
    };
  };
  auto expect_render = [](std::function<Expr()> make, std::string want) {
    return [make, want] {
      const std::string got = render(make());
      return std::pair{got == want, got};
    };
  };
  const std::vector<Case> cases{
      {"x''' = (x'')^(3/2) is hyper-CR Einstein-Weyl",
       expect_class("x2^(3/2)", Classification::HyperCREinsteinWeyl)},
      {"the radical equation is Einstein-Weyl but not hyper-CR",
       expect_class(kRadicalEquation, Classification::EinsteinWeylNotHyperCR)},
      {"x''' = 0 is point trivializable",
       expect_class("0", Classification::PointTrivializable)},
      {"Psi of x''' = (x'')^3 is -6*x2",
       expect_render([] { return psi(parse_equation("x2^3")); }, "-6*x2")},
      {"K1 of x''' = (x'')^3 is -3*x2^4",
       expect_render(
           [] { return k_invariants(parse_equation("x2^3")).k1; },
           "-3*x2^4")},
      {"x~ = x + t^3 maps x''' = 0 to x~''' = 6",
       expect_render(
           [] {
             return apply(fixture_maps()[1].build(), Equation(Expr())).rhs();
           },
           "6")},
  };

  bool ok = true;
  Json results = Json::array();
  std::ostringstream text;
  for (const auto &cs : cases) {
    const auto [pass, got] = cs.run();
    ok = ok && pass;
    results.push_back({{"name", cs.name}, {"passed", pass}, {"got", got}});
    text << (pass ? "PASS " : "FAIL ") << cs.name << " (" << got << ")\n";
  }
  if (c.format == Format::Json) {
    out << Json{{"selftest", results}, {"passed", ok}}.dump(2) << "\n";
  } else {
    out << text.str();
  }
  return ok ? kOk : kVerificationFailed;
}

const char *family_name(ErrorFamily f) {
  switch (f) {
  case ErrorFamily::Parse:
    return "parse";
  case ErrorFamily::Domain:
    return "domain";
  case ErrorFamily::Resource:
    return "resource";
  case ErrorFamily::Verification:
    return "verification";
  }
  return "domain";
}

int exit_code_of(ErrorFamily f) {
  switch (f) {
  case ErrorFamily::Parse:
    return kParseError;
  case ErrorFamily::Domain:
    return kDomainError;
  case ErrorFamily::Resource:
    return kResourceError;
  case ErrorFamily::Verification:
    return kVerificationFailed;
  }
  return kDomainError;
}

} // namespace

int run(const CliConfig &config, std::ostream &out, std::ostream &err) {
  try {
    if (config.command != Command::Selftest && config.equation.empty()) {
      throw InvalidArgument("--equation is required");
    }
    switch (config.command) {
    case Command::Classify:
      return cmd_classify(config, out);
    case Command::Invariants:
      return cmd_invariants(config, out);
    case Command::Transform:
      return cmd_transform(config, out);
    case Command::Verify:
      return cmd_verify(config, out);
    case Command::Selftest:
      return cmd_selftest(config, out);
    }
  } catch (const Error &e) {
    err << "error: " << e.kind() << ": " << e.what() << "\n";
    if (config.format == Format::Json) {
      Json j;
      j["kind"] = e.kind();
      j["family"] = family_name(e.family());
      j["message"] = e.what();
      if (const auto *se = dynamic_cast<const SyntaxError *>(&e)) {
        j["offset"] = se->offset();
        j["line"] = se->line();
        j["column"] = se->column();
      }
      out << Json{{"error", j}}.dump(2) << "\n";
    }
    return exit_code_of(e.family());
  }
  return kOk;
}

Parsed parse_arguments(int argc, char **argv, std::ostream &out,
                       std::ostream &err) {
  CLI::App app{"Point invariants and classification of third-order ODEs "
               "x''' = F(t, x, x', x'')"};
  app.require_subcommand(1);

  CliConfig config;
  std::string format = "text";
  std::string map_t, map_x, inv_t, inv_x;

  auto add_common = [&](CLI::App *sub) {
    sub->add_option("--equation,-e", config.equation,
                    "right-hand side F in t, x0, x1, x2 (or x, x', x'')");
    sub->add_option("--samples", config.samples, "numeric samples per test");
    sub->add_option("--seed", config.seed, "sampler seed");
    sub->add_option("--tol", config.tolerance, "absolute tolerance");
    sub->add_option("--box", config.box,
                    "sample box 'lo,hi' or four 'lo,hi' joined by ';'");
    sub->add_option("--format", format, "text or json")
        ->check(CLI::IsMember({"text", "json"}));
  };
  auto add_map = [&](CLI::App *sub) {
    sub->add_option("--map-t", map_t, "t~ as a function of t, x");
    sub->add_option("--map-x", map_x, "x~ as a function of t, x");
    sub->add_option("--inv-t", inv_t, "t as a function of t~, x~ (written t, x)");
    sub->add_option("--inv-x", inv_x, "x as a function of t~, x~ (written t, x)");
  };

  auto *classify_cmd = app.add_subcommand("classify", "classify an equation");
  add_common(classify_cmd);
  auto *invariants_cmd =
      app.add_subcommand("invariants", "print invariant expressions");
  add_common(invariants_cmd);
  invariants_cmd->add_option(
      "--name", config.names,
      "F, D3, W, C, K0, K1, Psi, I1, I2, J0, J1, J2 (repeatable)");
  invariants_cmd->add_option("--point", config.point,
                             "evaluate at 't,x0,x1,x2' (rationals)");
  auto *transform_cmd =
      app.add_subcommand("transform", "apply a point transformation");
  add_common(transform_cmd);
  add_map(transform_cmd);
  auto *verify_cmd = app.add_subcommand(
      "verify", "check identities and transformation rules");
  add_common(verify_cmd);
  add_map(verify_cmd);
  auto *selftest_cmd =
      app.add_subcommand("selftest", "run the built-in example fixtures");
  add_common(selftest_cmd);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError &e) {
    const int code = app.exit(e, out, err);
    return Parsed{std::nullopt, code == 0 ? kOk : kParseError};
  }

  if (*classify_cmd) {
    config.command = Command::Classify;
  } else if (*invariants_cmd) {
    config.command = Command::Invariants;
  } else if (*transform_cmd) {
    config.command = Command::Transform;
  } else if (*verify_cmd) {
    config.command = Command::Verify;
  } else {
    config.command = Command::Selftest;
  }
  config.format = format == "json" ? Format::Json : Format::Text;
  const int given = !map_t.empty() + !map_x.empty() + !inv_t.empty() +
                    !inv_x.empty();
  if (given == 4) {
    config.map = MapText{map_t, map_x, inv_t, inv_x};
  } else if (given != 0) {
    err << "error: --map-t, --map-x, --inv-t and --inv-x go together\n";
    return Parsed{std::nullopt, kParseError};
  }
  return Parsed{config, kOk};
}

} // namespace jetinv::cli
