// command-line driver: configure a type/weight/truncation, run the series and
// identity verifications, emit JSON reports and CSV coefficient tables
#include <CLI11.hpp>

#include <chrono>
#include <fstream>
#include <iostream>
#include <random>

#include "sphf/kzb.hpp"
#include "sphf/rankone.hpp"
#include "sphf/report.hpp"

using namespace sphf;
using rootdata::CartanType;
using rootdata::RootSystem;
using rootdata::WeightVec;
using Gi = GaussianRational;
using Q6 = Quad<6>;

namespace {

double ms_since(const std::chrono::steady_clock::time_point& t0) {
  return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
}

// scalar literals: "p/q", "i", "-i", "i/3", "2i/5"
Gi parse_scalar(std::string s) {
  bool neg = false;
  if (!s.empty() && (s[0] == '+' || s[0] == '-')) {
    neg = s[0] == '-';
    s = s.substr(1);
  }
  auto ipos = s.find('i');
  Gi out;
  if (ipos == std::string::npos) {
    out = Gi(parse_rational(s));
  } else {
    std::string rest = s.substr(0, ipos) + s.substr(ipos + 1);  // drop the 'i'
    Rational mag(1);
    if (!rest.empty()) {
      if (rest.front() == '/') mag = parse_rational("1" + rest);
      else mag = parse_rational(rest);
    }
    out = Gi(Rational(0), mag);
  }
  if (neg) out = -out;
  return out;
}

std::vector<Rational> parse_coords(const std::string& s) {
  std::vector<Rational> out;
  std::string cur;
  for (char ch : s + ",") {
    if (ch == ',') {
      if (!cur.empty()) out.push_back(parse_rational(cur));
      cur.clear();
    } else {
      cur += ch;
    }
  }
  if (out.empty()) throw std::invalid_argument("empty weight coordinate list");
  return out;
}

struct SigmaSpec {
  enum Kind { Chi, Irrep, Trivial } kind = Trivial;
  Gi chi;                      // character value (rank one)
  std::vector<Rational> fund;  // irrep highest weight, fundamental coords
};

// "--sigma chi:i/3,chi:i/5" or "irrep:1+0,irrep:0+1" or "trivial,trivial"
std::pair<SigmaSpec, SigmaSpec> parse_sigma(const std::string& s) {
  auto comma = s.find(',');
  if (comma == std::string::npos)
    throw std::invalid_argument("sigma spec needs two comma-separated parts");
  auto one = [](std::string p) {
    SigmaSpec out;
    if (p.rfind("chi:", 0) == 0) {
      out.kind = SigmaSpec::Chi;
      out.chi = parse_scalar(p.substr(4));
    } else if (p.rfind("irrep:", 0) == 0) {
      out.kind = SigmaSpec::Irrep;
      std::string cur;
      for (char ch : p.substr(6) + "+") {
        if (ch == '+') {
          if (!cur.empty()) out.fund.push_back(parse_rational(cur));
          cur.clear();
        } else {
          cur += ch;
        }
      }
    } else if (p == "trivial") {
      out.kind = SigmaSpec::Trivial;
    } else {
      throw std::invalid_argument("bad sigma spec: " + p);
    }
    return out;
  };
  return {one(s.substr(0, comma)), one(s.substr(comma + 1))};
}

struct Options {
  std::string type = "A1";
  std::string lambda;  // coordinate list; fundamental basis by default
  std::string basis = "fundamental";
  std::string sigma = "chi:i/3,chi:i/5";
  int m = 10;
  int trials = 50;
  unsigned long seed = 1;
  std::string out, out_csv;
};

WeightVec parse_weight(const RootSystem& rs, const Options& opt, const std::string& def) {
  std::string src = opt.lambda.empty() ? def : opt.lambda;
  auto coords = parse_coords(src);
  if (int(coords.size()) != rs.rank()) throw std::invalid_argument("weight rank mismatch");
  WeightVec w(coords, opt.basis == "fundamental" ? WeightVec::Basis::FundamentalWeight
                                                 : WeightVec::Basis::SimpleRoot);
  return rs.to_simple_root_basis(w);
}

nlohmann::ordered_json config_json(const Options& opt, const std::string& suite) {
  nlohmann::ordered_json j;
  j["suite"] = suite;
  j["type"] = opt.type;
  j["lambda"] = opt.lambda;
  j["basis"] = opt.basis;
  j["sigma"] = opt.sigma;
  j["m"] = opt.m;
  j["trials"] = opt.trials;
  j["seed"] = opt.seed;
  return j;
}

void write_report(const report::Report& rep, const std::string& path) {
  if (path.empty()) return;
  std::ofstream f(path);
  f << report::to_json(rep).dump(2) << "\n";
}

void print_report(const report::Report& rep) {
  for (const auto& c : rep.checks)
    std::cout << (c.pass ? "PASS" : "FAIL") << "  " << c.name << "  (m=" << c.m << ", "
              << c.wall_time_ms << " ms)\n";
  std::cout << (rep.pass() ? "overall: pass" : "overall: FAIL") << "\n";
}

report::Check make_check(const std::string& name, const std::string& anchor, bool pass, int m,
                         double ms) {
  report::Check c;
  c.name = name;
  c.anchor = anchor;
  c.pass = pass;
  c.m = m;
  c.wall_time_ms = ms;
  return c;
}

// ---------------------------------------------------------------------------
// hc subcommand
// ---------------------------------------------------------------------------

template <class F>
intertwine::KRep<F> krep_of(const envalg::GAlg<F>& g, const SigmaSpec& s, bool dual) {
  const auto& rs = g.rs();
  if (s.kind == SigmaSpec::Chi) {
    if constexpr (std::is_same_v<F, Gi>) {
      return intertwine::KRep<F>::character(rs, s.chi);
    } else {
      if (sgn(s.chi.im) != 0) throw std::invalid_argument("imaginary character needs Q(i)");
      return intertwine::KRep<F>::character(rs, FieldOps<F>::from(s.chi.re));
    }
  }
  if (s.kind == SigmaSpec::Trivial)
    return intertwine::KRep<F>::character(rs, FieldOps<F>::zero());
  WeightVec hw(s.fund, WeightVec::Basis::FundamentalWeight);
  long depth = 2;
  for (const auto& c : s.fund) depth += 2 * c.get_num().get_si();
  auto U = verma::irrep(g, rs.to_simple_root_basis(hw), int(depth) + 2);
  auto kr = intertwine::KRep<F>::from_findim(U);
  return dual ? kr.dual() : kr;
}

template <class F>
int run_hc(const RootSystem& rs, const Options& opt, const SigmaSpec& sl, const SigmaSpec& sr) {
  auto g = envalg::GAlg<F>::build(rs);
  auto k = envalg::KAlg<F>::build(g);
  radial::RadialCtx<F> ctx(g, k);
  radial::SigmaPair<F> sp{krep_of<F>(g, sl, false), krep_of<F>(g, sr, sr.kind == SigmaSpec::Irrep)};
  WeightVec lam = parse_weight(rs, opt, rs.rank() == 1 ? "1/2" : "2/5,3/7");
  auto hc = hcm::hc_coefficients_sigma(ctx, sp, lam, opt.m);

  if (!opt.out_csv.empty()) {
    std::ofstream f(opt.out_csv);
    f << "gamma_coords,entry_row,entry_col,value\n";
    for (const auto& [gm, mat] : hc.c)
      for (int i = 0; i < mat.rows(); ++i)
        for (int j = 0; j < mat.cols(); ++j) {
          if (sphf::is_zero(mat(i, j))) continue;
          std::string gs;
          for (size_t t = 0; t < gm.size(); ++t) gs += (t ? ";" : "") + std::to_string(gm[t]);
          f << gs << "," << i << "," << j << "," << scalar_str(mat(i, j)) << "\n";
        }
  }
  report::Report rep;
  rep.config = config_json(opt, "hc");
  rep.checks.push_back(make_check("hc-coefficients", "harish-chandra-recursion", true, opt.m, 0));
  if (!opt.out.empty()) {
    auto j = report::to_json(rep);
    j["table"] = nlohmann::ordered_json::array();
    for (const auto& [gm, mat] : hc.c)
      for (int i = 0; i < mat.rows(); ++i)
        for (int jcol = 0; jcol < mat.cols(); ++jcol) {
          if (sphf::is_zero(mat(i, jcol))) continue;
          nlohmann::ordered_json row;
          row["gamma"] = gm;
          row["row"] = i;
          row["col"] = jcol;
          row["value"] = scalar_str(mat(i, jcol));
          j["table"].push_back(std::move(row));
        }
    std::ofstream f(opt.out);
    f << j.dump(2) << "\n";
  }
  for (const auto& [gm, mat] : hc.c) {
    std::string gs;
    for (size_t t = 0; t < gm.size(); ++t) gs += (t ? ";" : "") + std::to_string(gm[t]);
    std::cout << gs;
    for (int i = 0; i < mat.rows(); ++i)
      for (int j = 0; j < mat.cols(); ++j)
        if (!sphf::is_zero(mat(i, j)))
          std::cout << " [" << i << "," << j << "]=" << scalar_str(mat(i, j));
    std::cout << "\n";
  }
  return 0;
}

// ---------------------------------------------------------------------------
// verify suites
// ---------------------------------------------------------------------------

template <class F>
void suite_radial(const RootSystem& rs, const Options& opt, report::Report& rep) {
  auto t0 = std::chrono::steady_clock::now();
  auto g = envalg::GAlg<F>::build(rs);
  auto k = envalg::KAlg<F>::build(g);
  radial::RadialCtx<F> ctx(g, k);
  std::mt19937_64 rng(opt.seed);
  bool ok = true;
  for (int t = 0; t < opt.trials && ok; ++t) {
    envalg::Mono mo;
    int len = 1 + int(rng() % 4);
    for (int i = 0; i < len; ++i) mo.push_back(uint8_t(rng() % size_t(g.dim())));
    std::sort(mo.begin(), mo.end());
    envalg::Elem<F> x;
    x.t[mo] = FieldOps<F>::one();
    for (int pt = 0; pt < 3 && ok; ++pt) {
      fseries::TorusPoint a;
      for (int i = 0; i < rs.rank(); ++i)
        a.t.push_back(ratio(1 + long(rng() % 9), 11 + long(rng() % 9)));
      ok = ctx.verify_gamma(x, a);
    }
  }
  rep.checks.push_back(make_check("radial-gamma-oracle", "radial-component-roundtrip", ok, opt.m,
                                  ms_since(t0)));
  auto t1 = std::chrono::steady_clock::now();
  rep.checks.push_back(make_check("radial-casimir-closed-form", "casimir-radial-component",
                                  ctx.radial_casimir() == ctx.radial_component(g.casimir()),
                                  opt.m, ms_since(t1)));
}

template <class F>
void suite_mainthmf(const RootSystem& rs, const Options& opt, report::Report& rep) {
  auto t0 = std::chrono::steady_clock::now();
  auto g = envalg::GAlg<F>::build(rs);
  auto k = envalg::KAlg<F>::build(g);
  radial::RadialCtx<F> ctx(g, k);
  hcm::MainThmReport r;
  hcm::SchrodingerReport sr;
  if (rs.rank() == 1) {
    intertwine::KRep<F> Vl = intertwine::KRep<F>::character(rs, FieldOps<F>::zero());
    intertwine::KRep<F> Vr = Vl;
    if constexpr (std::is_same_v<F, Gi>) {
      Vl = intertwine::KRep<F>::character(rs, Gi(Rational(0), Rational(1, 3)));
      Vr = intertwine::KRep<F>::character(rs, Gi(Rational(0), Rational(-1, 5)));
    } else {
      Vl = intertwine::KRep<F>::character(rs, FieldOps<F>::from(Rational(1, 3)));
      Vr = intertwine::KRep<F>::character(rs, FieldOps<F>::from(Rational(-1, 5)));
    }
    WeightVec lam = parse_weight(rs, opt, "1/2");
    r = hcm::verify_main_theorem(ctx, Vl, Vr, lam, {FieldOps<F>::one()}, {FieldOps<F>::one()},
                                 opt.m);
    sr = hcm::verify_schrodinger(ctx, Vl, Vr, lam + rs.rho(), {FieldOps<F>::one()},
                                 {FieldOps<F>::one()}, opt.m);
  } else {
    WeightVec om1 = rs.to_simple_root_basis(
        WeightVec({Rational(1), Rational(0)}, WeightVec::Basis::FundamentalWeight));
    auto U3 = verma::irrep(g, om1, 4);
    auto V = intertwine::KRep<F>::from_findim(U3);
    WeightVec lam = parse_weight(rs, opt, "2/5,3/7");
    std::vector<F> v = {FieldOps<F>::one(), FieldOps<F>::from(Rational(1, 2)),
                        FieldOps<F>::from(Rational(-1, 3))};
    std::vector<F> f = {FieldOps<F>::from(Rational(2)), FieldOps<F>::zero(),
                        FieldOps<F>::from(Rational(1, 5))};
    r = hcm::verify_main_theorem(ctx, V, V, lam, v, f, opt.m);
    sr = hcm::verify_schrodinger(ctx, V, V, lam + rs.rho(), v, f, opt.m);
  }
  rep.checks.push_back(make_check("mainthmf-eigen", "spherical-series-eigen-equation", r.eigen,
                                  opt.m, ms_since(t0)));
  rep.checks.push_back(make_check("mainthmf-coefficients", "weight-components-vs-hc-coefficients",
                                  r.coefficients, opt.m, 0));
  rep.checks.push_back(
      make_check("mainthmf-hc-route", "spherical-equals-hc-series", r.hc_route, opt.m, 0));
  rep.checks.push_back(
      make_check("schrodinger", "normalized-schrodinger-equation", sr.schrodinger, opt.m, 0));
  rep.checks.push_back(
      make_check("schrodinger-hz", "gauged-casimir-eigenvalue", sr.hz_eigen, opt.m, 0));
}

template <class F>
void suite_cdybe(const RootSystem& rs, const Options& opt, report::Report& rep) {
  auto g = envalg::GAlg<F>::build(rs);
  auto k = envalg::KAlg<F>::build(g);
  auto t0 = std::chrono::steady_clock::now();
  for (auto& idr : kzb::verify_cdybe(g, k, opt.m)) {
    report::Check c = make_check(idr.name, "mixed-classical-dynamical-yang-baxter", idr.pass,
                                 idr.m, ms_since(t0));
    c.identity = idr.name;
    c.type = rootdata::cartan_type_name(rs.type());
    c.rank = rs.rank();
    for (const auto& gm : idr.residual_support) {
      std::string gs;
      for (size_t t = 0; t < gm.size(); ++t) gs += (t ? ";" : "") + std::to_string(gm[t]);
      c.residual_support.push_back(gs);
    }
    rep.checks.push_back(std::move(c));
  }
}

template <class F>
void suite_reflection(const RootSystem& rs, const Options& opt, report::Report& rep) {
  auto g = envalg::GAlg<F>::build(rs);
  auto k = envalg::KAlg<F>::build(g);
  auto t0 = std::chrono::steady_clock::now();
  auto idr = kzb::verify_reflection(g, k, opt.m);
  report::Check c = make_check(idr.name, "mixed-classical-dynamical-reflection", idr.pass, idr.m,
                               ms_since(t0));
  c.identity = idr.name;
  c.type = rootdata::cartan_type_name(rs.type());
  c.rank = rs.rank();
  rep.checks.push_back(std::move(c));
}

void suite_poisson(const Options& opt, report::Report& rep) {
  auto rs = RootSystem::build(CartanType::A1);
  auto t0 = std::chrono::steady_clock::now();
  Rational lam = opt.lambda.empty() ? Rational(1, 2) : parse_rational(opt.lambda);
  auto r1 = rankone::verify_poisson(rs, lam, Gi(Rational(0), Rational(1, 3)),
                                    Gi(Rational(0), Rational(1, 5)), opt.m);
  rep.checks.push_back(make_check("poisson-kernel-1", "meixner-pollaczek-poisson-kernel", r1.pass,
                                  opt.m, ms_since(t0)));
  auto t1 = std::chrono::steady_clock::now();
  auto r2 = rankone::verify_poisson(rs, Rational(-3, 7), Gi(Rational(0), Rational(2, 5)),
                                    Gi(Rational(0), Rational(-1, 2)), opt.m);
  rep.checks.push_back(make_check("poisson-kernel-2", "meixner-pollaczek-poisson-kernel", r2.pass,
                                  opt.m, ms_since(t1)));
}

void suite_kzb(const Options& opt, report::Report& rep) {
  auto rs = RootSystem::build(CartanType::A1);
  auto g = envalg::GAlg<Rational>::build(rs);
  auto k = envalg::KAlg<Rational>::build(g);
  auto U = verma::irrep(g, WeightVec({Rational(1)}), 4);
  auto V2 = verma::irrep(g, WeightVec({Rational(1, 2)}), 3);
  auto Vl = intertwine::KRep<Rational>::from_findim(V2);
  auto Vr = intertwine::KRep<Rational>::from_findim(V2);
  std::vector<Rational> uz(3, Rational(0)), ua(3, Rational(0));
  for (int i = 0; i < 3; ++i) {
    if (U.wt_off[size_t(i)] == fseries::Expo{-1}) uz[size_t(i)] = Rational(1);
    if (U.wt_off[size_t(i)] == fseries::Expo{0}) ua[size_t(i)] = Rational(1);
  }
  WeightVec lam({Rational(22, 7)});
  {
    auto t0 = std::chrono::steady_clock::now();
    auto ra = kzb::verify_factorization(g, k, 'a', WeightVec({Rational(7, 9)}), U, uz, 4, opt.m);
    rep.checks.push_back(make_check("factorization-a", "casimir-factorization-unfolded", ra.pass,
                                    opt.m, ms_since(t0)));
  }
  {
    auto t0 = std::chrono::steady_clock::now();
    auto rb = kzb::verify_factorization(g, k, 'b', WeightVec({Rational(7, 9)}), U, uz, 4, opt.m);
    rep.checks.push_back(make_check("factorization-b", "casimir-factorization-folded", rb.pass,
                                    opt.m, ms_since(t0)));
  }
  {
    auto t0 = std::chrono::steady_clock::now();
    auto r1 = kzb::verify_bkzb_eigen(g, k, Vl, Vr, {&U}, lam, {ua}, {Rational(1), Rational(2)},
                                     {Rational(1), Rational(-1)}, std::min(opt.m, 5));
    rep.checks.push_back(make_check("bkzb-eigen-n1", "boundary-kzb-eigen-equations", r1.pass(),
                                    std::min(opt.m, 5), ms_since(t0)));
  }
  {
    auto t0 = std::chrono::steady_clock::now();
    kzb::KZBContext<Rational> ctx(g, k, Vl, Vr.dual(), {&U, &U}, std::min(opt.m, 6));
    rep.checks.push_back(make_check("bkzb-commutativity-n2", "boundary-kzb-commutativity",
                                    kzb::verify_commutativity(ctx), std::min(opt.m, 6),
                                    ms_since(t0)));
  }
}

int cmd_verify(const std::string& suite, const Options& opt) {
  report::Report rep;
  rep.config = config_json(opt, suite);
  auto type = rootdata::parse_cartan_type(opt.type);
  auto rs = RootSystem::build(type);
  auto dispatch = [&](auto runner) {
    if (type == CartanType::A1) runner(rs, std::integral_constant<int, 1>{});
    else if (type == CartanType::A2) runner(rs, std::integral_constant<int, 2>{});
    else throw std::invalid_argument("suite unavailable for type " + opt.type);
  };
  bool known = false;
  if (suite == "radial" || suite == "all") {
    known = true;
    dispatch([&](const RootSystem& r, auto ic) {
      if constexpr (decltype(ic)::value == 1) suite_radial<Rational>(r, opt, rep);
      else suite_radial<Q6>(r, opt, rep);
    });
  }
  if (suite == "mainthmf" || suite == "all") {
    known = true;
    dispatch([&](const RootSystem& r, auto ic) {
      if constexpr (decltype(ic)::value == 1) suite_mainthmf<Gi>(r, opt, rep);
      else suite_mainthmf<Q6>(r, opt, rep);
    });
  }
  if (suite == "cdybe" || suite == "all") {
    known = true;
    dispatch([&](const RootSystem& r, auto ic) {
      if constexpr (decltype(ic)::value == 1) suite_cdybe<Rational>(r, opt, rep);
      else suite_cdybe<Q6>(r, opt, rep);
    });
  }
  if (suite == "reflection" || suite == "all") {
    known = true;
    dispatch([&](const RootSystem& r, auto ic) {
      if constexpr (decltype(ic)::value == 1) suite_reflection<Rational>(r, opt, rep);
      else suite_reflection<Q6>(r, opt, rep);
    });
  }
  if (suite == "poisson" || suite == "all") {
    known = true;
    suite_poisson(opt, rep);
  }
  if (suite == "kzb" || suite == "all") {
    known = true;
    suite_kzb(opt, rep);
  }
  if (!known) throw std::invalid_argument("unknown suite: " + suite);
  rep.sort_checks();
  print_report(rep);
  write_report(rep, opt.out);
  return rep.pass() ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "exact verification suite for radial components, spherical series and dynamical "
      "r/k-matrices"};
  app.set_config("--config");
  app.require_subcommand(1);

  Options opt;
  std::string suite;
  std::vector<std::string> merge_inputs;
  std::string merge_out;

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--type", opt.type, "Cartan type: A1, A2 (B2: root data only)");
    sub->add_option("--lambda", opt.lambda, "weight coordinates, comma separated");
    sub->add_option("--basis", opt.basis, "weight basis: fundamental|root");
    sub->add_option("--sigma", opt.sigma, "pair 'chi:<val>,chi:<val>' or 'irrep:<f1+f2>,...'");
    sub->add_option("--m", opt.m, "truncation height");
    sub->add_option("--trials", opt.trials, "randomized trials");
    sub->add_option("--seed", opt.seed, "random seed");
    sub->add_option("--out", opt.out, "JSON report path");
  };

  CLI::App* hc = app.add_subcommand("hc", "Harish-Chandra coefficient table");
  add_common(hc);
  hc->add_option("--out-csv", opt.out_csv, "CSV output path");

  CLI::App* verify = app.add_subcommand("verify", "run a verification suite");
  verify->add_option("suite", suite, "radial|mainthmf|kzb|cdybe|reflection|poisson|all")
      ->required();
  add_common(verify);

  CLI::App* merge = app.add_subcommand("report-merge", "merge JSON reports");
  merge->add_option("out", merge_out, "output path")->required();
  merge->add_option("inputs", merge_inputs, "input reports")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);
    app.exit(e);
    return 2;
  }

  try {
    if (hc->parsed()) {
      auto type = rootdata::parse_cartan_type(opt.type);
      auto rs = RootSystem::build(type);
      auto [sl, sr] = parse_sigma(opt.sigma);
      bool needs_i = (sl.kind == SigmaSpec::Chi && sgn(sl.chi.im) != 0) ||
                     (sr.kind == SigmaSpec::Chi && sgn(sr.chi.im) != 0);
      if (type == CartanType::A2) return run_hc<Q6>(rs, opt, sl, sr);
      if (needs_i) return run_hc<Gi>(rs, opt, sl, sr);
      return run_hc<Rational>(rs, opt, sl, sr);
    }
    if (verify->parsed()) return cmd_verify(suite, opt);
    if (merge->parsed()) {
      std::vector<report::Report> reps;
      for (const auto& p : merge_inputs) {
        std::ifstream f(p);
        if (!f) throw std::invalid_argument("cannot open report: " + p);
        nlohmann::ordered_json j;
        f >> j;
        reps.push_back(report::from_json(j));
      }
      auto merged = report::merge(reps);
      std::ofstream f(merge_out);
      f << report::to_json(merged).dump(2) << "\n";
      print_report(merged);
      return merged.pass() ? 0 : 1;
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 2;
}
