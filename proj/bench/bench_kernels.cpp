// Benchmark comparing the OpenMP kernels against the serial reference on the
// hot paths: series products, operator application (HC recursion), the
// radial Gamma-oracle batch, and a dynamical Yang-Baxter residual.
#include <chrono>
#include <cstdio>
#include <random>

#include "sphf/kzb.hpp"

using namespace sphf;
using namespace sphf::envalg;
using namespace sphf::fseries;
using rootdata::CartanType;
using rootdata::RootSystem;
using rootdata::WeightVec;
using Q6 = Quad<6>;

namespace {

double time_ms(const std::function<void()>& fn) {
  auto t0 = std::chrono::steady_clock::now();
  fn();
  return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
}

Series<Rational> dense_series(const RootSystem& rs, int m, unsigned seed) {
  std::mt19937_64 rng(seed);
  Series<Rational> s(rs, WeightVec(std::vector<Rational>(size_t(rs.rank()), Rational(0))), m);
  for (const auto& g : rs.enumerate_qminus(m))
    s.add(g, ratio(long(rng() % 2001) - 1000, 1 + long(rng() % 97)));
  return s;
}

void run_pair(const char* name, const std::function<void()>& fn) {
  par::enabled_flag() = false;
  double serial = time_ms(fn);
  par::enabled_flag() = true;
  double parallel = time_ms(fn);
  std::printf("%-38s serial %9.1f ms   omp %9.1f ms   speedup %.2fx\n", name, serial, parallel,
              parallel > 0 ? serial / parallel : 0.0);
}

}  // namespace

int main() {
#ifdef _OPENMP
  std::printf("OpenMP enabled, max threads %d\n", par::worker_count());
#else
  std::printf("built without OpenMP; both columns run the serial path\n");
#endif
  auto rsA2 = RootSystem::build(CartanType::A2);
  auto gA2 = GAlg<Q6>::build(rsA2);
  auto kA2 = KAlg<Q6>::build(gA2);
  auto rsA1 = RootSystem::build(CartanType::A1);
  auto gA1 = GAlg<Rational>::build(rsA1);
  auto kA1 = KAlg<Rational>::build(gA1);

  {
    auto a = dense_series(rsA2, 40, 1), b = dense_series(rsA2, 40, 2);
    run_pair("scalar series product (A2, h=40)", [&] {
      auto c = series_mul(a, b);
      (void)c;
    });
  }
  {
    run_pair("cdYBE identity residuals (A2, h=7)", [&] {
      auto reps = kzb::verify_cdybe(gA2, kA2, 7);
      (void)reps;
    });
  }
  {
    run_pair("radial Gamma-oracle (A2, 20 monomials)", [&] {
      radial::RadialCtx<Q6> ctx(gA2, kA2);
      std::mt19937_64 rng(7);
      for (int t = 0; t < 20; ++t) {
        Mono mo;
        for (int i = 0; i < 4; ++i) mo.push_back(uint8_t(rng() % size_t(gA2.dim())));
        std::sort(mo.begin(), mo.end());
        Elem<Q6> x;
        x.t[mo] = FieldOps<Q6>::one();
        TorusPoint a{{Rational(1, 2), Rational(2, 5)}};
        if (!ctx.verify_gamma(x, a)) std::printf("unexpected mismatch!\n");
      }
    });
  }
  {
    run_pair("HC recursion (A2 represented, h=8)", [&] {
      radial::RadialCtx<Q6> ctx(gA2, kA2);
      auto U3 = verma::irrep(
          gA2, rsA2.to_simple_root_basis(WeightVec({Rational(1), Rational(0)},
                                                   WeightVec::Basis::FundamentalWeight)),
          4);
      auto V = intertwine::KRep<Q6>::from_findim(U3);
      auto sp = radial::SigmaPair<Q6>::modules(V, V);
      auto hc = hcm::hc_coefficients_sigma(ctx, sp, WeightVec({Rational(2, 5), Rational(3, 7)}),
                                           8);
      (void)hc;
    });
  }
  {
    run_pair("KZB commutators (A1 represented, h=8)", [&] {
      auto U = verma::irrep(gA1, WeightVec({Rational(1)}), 4);
      auto V2 = verma::irrep(gA1, WeightVec({Rational(1, 2)}), 3);
      kzb::KZBContext<Rational> ctx(gA1, kA1, intertwine::KRep<Rational>::from_findim(V2),
                                    intertwine::KRep<Rational>::from_findim(V2).dual(), {&U, &U},
                                    8);
      if (!kzb::verify_commutativity(ctx)) std::printf("unexpected mismatch!\n");
    });
  }
  par::enabled_flag() = true;
  return 0;
}
