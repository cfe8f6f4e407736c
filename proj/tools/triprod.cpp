// triprod: runs the verification suites and writes a JSON or CSV report.
// Exit status: 0 all suites pass, 1 some suite failed (report still written),
// 2 usage error or invalid input.

#include <CLI11.hpp>

#include <chrono>
#include <ctime>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "triprod/triprod.hpp"

namespace {

using triprod::cplx;

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Accepts "x", "yi", "x+yi", "x-yi", "i", "-i".
cplx parse_complex(std::string s) {
  std::erase(s, ' ');
  auto fail = [&] { return UsageError("cannot parse complex number '" + s + "'"); };
  if (s.empty()) throw fail();
  auto num = [&](const std::string& t) -> double {
    if (t.empty() || t == "+") return 1.0;
    if (t == "-") return -1.0;
    std::size_t pos = 0;
    double v = 0.0;
    try {
      v = std::stod(t, &pos);
    } catch (const std::exception&) {
      throw fail();
    }
    if (pos != t.size()) throw fail();
    return v;
  };
  if (s.back() != 'i') return {num(s), 0.0};
  const std::string body = s.substr(0, s.size() - 1);
  // Split at the last sign that is not the leading one or an exponent sign.
  for (std::size_t k = body.size(); k-- > 1;) {
    if ((body[k] == '+' || body[k] == '-') && body[k - 1] != 'e' && body[k - 1] != 'E')
      return {num(body.substr(0, k)), num(body.substr(k))};
  }
  return {0.0, num(body)};
}

struct Config {
  std::string command;
  std::optional<int> d;
  std::optional<double> tol, quad_tol;
  std::uint64_t seed = 20240601;
  std::string out, format = "json";
  std::string lam = "0.5", mu = "0.5", nu = "0.5";
  std::int64_t samples = 100000;
  int count = 1000;
};

std::vector<int> dims(const Config& c, std::vector<int> fallback) {
  return c.d ? std::vector<int>{*c.d} : fallback;
}

void run_command(const std::string& cmd, const Config& c, std::vector<triprod::IdentityReport>& out) {
  using namespace triprod;
  auto append = [&](std::vector<IdentityReport> v) { out.insert(out.end(), v.begin(), v.end()); };
  if (cmd == "iwasawa-check") {
    for (int d : dims(c, {2, 3, 4, 5})) append(group_model_suite(d, c.count, c.seed + d));
  } else if (cmd == "orbit") {
    for (int d : dims(c, {2, 3, 4, 5, 6})) out.push_back(orbit_suite(d, c.seed + d));
  } else if (cmd == "lemma12") {
    for (int d : dims(c, {2, 3})) append(lemma12_suite(d, 5, c.samples, c.seed + d));
  } else if (cmd == "triple-eval") {
    const int d = c.d.value_or(2);
    const SpectralTriple st(parse_complex(c.lam), parse_complex(c.mu), parse_complex(c.nu), Dimension(d));
    out.push_back(triple_eval_suite(st, c.quad_tol.value_or(c.tol.value_or(1e-6))));
  } else if (cmd == "recursions") {
    for (int d : dims(c, {2, 3})) {
      const int n = Dimension(d).n();
      append(recursion_suite(n, default_recursion_points(n), c.quad_tol.value_or(1e-6), c.tol.value_or(1e-4)));
    }
  } else if (cmd == "theorem31") {
    for (int d : dims(c, {2, 3, 4})) {
      const Dimension dim(d);
      std::vector<SpectralTriple> pts;
      for (double l : {0.5, 1.0, 1.5, 2.0, 3.0}) pts.emplace_back(cplx(0.0, l), cplx(0.0, 0.7), cplx(0.0, 0.3), dim);
      out.push_back(t_st_closed_ratio_test(pts, c.tol.value_or(1e-3), c.quad_tol.value_or(1e-5)));
    }
  } else if (cmd == "asymptotics") {
    for (int d : dims(c, {3})) {
      auto rep = asymptotic_slope_test(d, cplx(0.0, 0.7), cplx(0.0, 0.3), {8.0, 16.0, 32.0},
                                       c.quad_tol.value_or(1e-6), 0.7, c.tol.value_or(1e-6));
      out.push_back(rep.slope);
      out.push_back(rep.closed);
    }
  } else if (cmd == "all") {
    Config sub = c;
    sub.d.reset();
    for (const char* name : {"iwasawa-check", "orbit", "lemma12", "triple-eval", "recursions", "theorem31", "asymptotics"}) {
      sub.tol = name == std::string("triple-eval") ? c.tol : std::nullopt;
      run_command(name, sub, out);
    }
  } else {
    throw UsageError("unknown command " + cmd);
  }
}

std::string utc_timestamp() {
  const std::time_t now = std::time(nullptr);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&now));
  return buf;
}

}  // namespace

int main(int argc, char** argv) {
  using namespace triprod;
  CLI::App app{"Verification suites for invariant triple products on SO(d,1)"};
  app.require_subcommand(1, 1);
  Config cfg;
  auto opt_real = [](CLI::App* sub, const char* name, std::optional<double>& v, const char* help) {
    sub->add_option_function<double>(name, [&v](double x) { v = x; }, help)->check(CLI::PositiveNumber);
  };
  const std::vector<std::pair<const char*, const char*>> commands = {
      {"iwasawa-check", "group model: metric, Iwasawa round-trip and a_power on random elements"},
      {"orbit", "open-orbit count and AM tangent rank"},
      {"lemma12", "Monte Carlo check of the K-integral transformation formula"},
      {"triple-eval", "evaluate T_st(lam, mu, nu) by quadrature"},
      {"recursions", "recursion identities for I_n and I_n' (n = d - 1)"},
      {"theorem31", "constancy of T_st / Gamma-ratio on the unitary axis"},
      {"asymptotics", "large-lambda behaviour of T_st"},
      {"all", "every suite with default settings"}};
  for (const auto& [name, help] : commands) {
    CLI::App* sub = app.add_subcommand(name, help);
    sub->add_option_function<int>("--d", [&cfg](int d) { cfg.d = d; }, "dimension d of SO(d,1); default: suite list")
        ->check(CLI::Range(2, 64));
    opt_real(sub, "--tol", cfg.tol, "suite tolerance (residual / spread threshold)");
    opt_real(sub, "--quad-tol", cfg.quad_tol, "relative quadrature tolerance");
    sub->add_option("--seed", cfg.seed, "random seed");
    sub->add_option("--out", cfg.out, "report file (default: stdout)");
    sub->add_option("--format", cfg.format, "json or csv")->check(CLI::IsMember({"json", "csv"}));
    if (std::string(name) == "triple-eval") {
      sub->add_option("--lam", cfg.lam, "lambda, e.g. 0.5 or 2i or 0.1+2i");
      sub->add_option("--mu", cfg.mu, "mu");
      sub->add_option("--nu", cfg.nu, "nu");
    }
    if (std::string(name) == "lemma12")
      sub->add_option("--samples", cfg.samples, "Haar samples per side")->check(CLI::Range(std::int64_t{2}, std::int64_t{1} << 40));
    if (std::string(name) == "iwasawa-check")
      sub->add_option("--count", cfg.count, "random elements per d")->check(CLI::Range(1, 10000000));
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::Success& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }
  cfg.command = app.get_subcommands().front()->get_name();

  Report report;
  const auto t0 = std::chrono::steady_clock::now();
  try {
    run_command(cfg.command, cfg, report.suites);
  } catch (const UsageError& e) {
    std::cerr << "triprod: " << e.what() << "\n";
    return 2;
  } catch (const DomainError& e) {
    std::cerr << "triprod: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "triprod: " << e.what() << "\n";
    return 1;
  }
  const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

  auto opt_num = [](const std::optional<double>& v) { return v ? json::number(*v) : std::string("null"); };
  report.meta = {{"tool", json::string("triprod")},
                 {"command", json::string(cfg.command)},
                 {"d", cfg.d ? std::to_string(*cfg.d) : "null"},
                 {"tol", opt_num(cfg.tol)},
                 {"quad_tol", opt_num(cfg.quad_tol)},
                 {"seed", std::to_string(cfg.seed)},
                 {"format", json::string(cfg.format)},
                 {"timestamp", json::string(utc_timestamp())},
                 {"wall_time_s", json::number(wall)}};

  std::ostringstream buf;
  if (cfg.format == "csv")
    write_csv(buf, report);
  else
    write_json(buf, report);
  if (cfg.out.empty()) {
    std::cout << buf.str();
  } else {
    std::ofstream f(cfg.out, std::ios::binary);
    f << buf.str();
    if (!f) {
      std::cerr << "triprod: cannot write " << cfg.out << "\n";
      return 2;
    }
  }
  for (const auto& s : report.suites)
    std::cerr << (s.pass ? "PASS " : "FAIL ") << s.identity_name << "  max_residual=" << json::number(s.max_residual)
              << " tol=" << json::number(s.tolerance) << "\n";
  return report.pass() ? 0 : 1;
}
