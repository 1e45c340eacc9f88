#include <doctest.h>

#include <sstream>

#include <json.hpp>

#include "cli.hpp"

using namespace jetinv::cli;

namespace {

struct Result {
  int code;
  std::string out;
  std::string err;
};

Result run_args(std::vector<std::string> args) {
  args.insert(args.begin(), "jetinv");
  std::vector<char *> argv;
  for (auto &a : args) {
    argv.push_back(a.data());
  }
  std::ostringstream out, err;
  const Parsed parsed =
      parse_arguments(static_cast<int>(argv.size()), argv.data(), out, err);
  if (!parsed.config) {
    return {parsed.exit_code, out.str(), err.str()};
  }
  const int code = run(*parsed.config, out, err);
  return {code, out.str(), err.str()};
}

} // namespace

TEST_CASE("classify") {
  const auto r = run_args({"classify", "-e", "x2^(3/2)"});
  CHECK(r.code == kOk);
  CHECK(r.out.find("classification  HyperCREinsteinWeyl") != std::string::npos);

  const auto j = run_args({"classify", "-e", "0", "--format", "json"});
  CHECK(j.code == kOk);
  const auto doc = nlohmann::json::parse(j.out);
  CHECK(doc["classification"] == "PointTrivializable");
  CHECK(doc["verdicts"]["I"]["status"] == "undefined");
  CHECK(doc["plan"]["seed"] == 0xDA7A);
}

TEST_CASE("json output is reproducible") {
  const std::vector<std::string> args{"classify", "-e", "x2^3 + t*x0",
                                      "--format", "json", "--seed", "7"};
  CHECK(run_args(args).out == run_args(args).out);
}

TEST_CASE("invariants") {
  CHECK(run_args({"invariants", "-e", "x2^3", "--name", "psi"}).out ==
        "-6*x2\n");
  const auto r = run_args(
      {"invariants", "-e", "x2^3", "--name", "K1", "--point", "0,0,0,1/2"});
  CHECK(r.out.find("-3/16") != std::string::npos);
  const auto all = run_args({"invariants", "-e", "x0"});
  CHECK(all.code == kOk);
  CHECK(all.out.find("Psi undefined") != std::string::npos);
  CHECK(run_args({"invariants", "-e", "x0", "--name", "Psi"}).code ==
        kDomainError);
  CHECK(run_args({"invariants", "-e", "x0", "--name", "Q"}).code ==
        kDomainError);
}

TEST_CASE("transform") {
  const auto r = run_args({"transform", "-e", "0", "--map-t", "t", "--map-x",
                           "x + t^3", "--inv-t", "t", "--inv-x", "x - t^3"});
  CHECK(r.code == kOk);
  CHECK(r.out == "x~''' = 6\ng = 1\n");
  CHECK(run_args({"transform", "-e", "0"}).code == kDomainError);
  CHECK(run_args({"transform", "-e", "0", "--map-t", "t"}).code == kParseError);
}

TEST_CASE("verify and selftest") {
  CHECK(run_args({"verify", "-e", "x2^3", "--map-t", "t + x", "--map-x", "x",
                  "--inv-t", "t - x", "--inv-x", "x"})
            .code == kOk);
  const auto s = run_args({"selftest"});
  CHECK(s.code == kOk);
  CHECK(s.out.find("FAIL") == std::string::npos);
}

TEST_CASE("errors map to exit codes") {
  const auto syntax = run_args({"classify", "-e", "x2 +", "--format", "json"});
  CHECK(syntax.code == kParseError);
  const auto doc = nlohmann::json::parse(syntax.out);
  CHECK(doc["error"]["kind"] == "SyntaxError");
  CHECK(doc["error"]["family"] == "parse");
  CHECK(doc["error"]["offset"] == 4);

  CHECK(run_args({"classify", "-e", "x3"}).code == kParseError);
  CHECK(run_args({"classify"}).code == kDomainError);
  CHECK(run_args({"classify", "-e", "x2", "--samples", "0"}).code ==
        kDomainError);
  CHECK(run_args({"classify", "-e", "x2", "--box", "1,0"}).code ==
        kDomainError);
  CHECK(run_args({"classify", "-e", "x2", "--box", "a,b"}).code == kParseError);
  CHECK(run_args({"frobnicate"}).code == kParseError);
  CHECK(run_args({"classify", "-e", "x2", "--format", "xml"}).code ==
        kParseError);
  CHECK(run_args({"classify", "-e", "sqrt(-1 - x0^2)"}).code == kDomainError);
}
