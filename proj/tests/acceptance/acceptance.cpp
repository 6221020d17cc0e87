// Acceptance suite: one PASS/FAIL line per criterion, followed by the
// measurements behind it. Exit status is nonzero when any selected
// criterion fails.
#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdarg>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "oracles.hpp"
#include "tpinv/circ_ring.hpp"
#include "tpinv/deblur.hpp"
#include "tpinv/gen_inverse.hpp"
#include "tpinv/io.hpp"
#include "tpinv/tensor.hpp"

using namespace tpinv;
namespace fs = std::filesystem;

namespace {

const fs::path kFixtures = TPINV_FIXTURE_DIR;

DenseTensor load(const std::string& name) { return io::read_tns((kFixtures / (name + ".tns")).string()); }

struct Verdict {
  bool pass = true;
  std::vector<std::string> details;

  // Records a measurement and folds its outcome into the verdict.
  void check(bool ok, const char* fmt, ...) __attribute__((format(printf, 3, 4))) {
    char buf[512];
    va_list args;
    va_start(args, fmt);
    std::vsnprintf(buf, sizeof buf, fmt, args);
    va_end(args);
    details.push_back(std::string(ok ? "ok   " : "FAIL ") + buf);
    pass = pass && ok;
  }
};

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

InverseOptions on_route(Route r) {
  InverseOptions o;
  o.route = r;
  return o;
}

const char* route_name(Route r) { return r == Route::cholesky ? "cholesky" : "svd"; }

double max_diff(const ring::RingElem& a, const ring::RingElem& b) {
  double d = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) d = std::max(d, std::abs(a[i] - b[i]));
  return d;
}

Verdict reverse_order_failure() {
  Verdict v;
  const auto t0 = Clock::now();
  const DenseTensor a = load("revorder_a"), b = load("revorder_b");
  const DenseTensor ab = tprod(a, b);
  for (Route r : {Route::cholesky, Route::svd}) {
    const InverseOptions o = on_route(r);
    const DenseTensor ap = mp_inverse(a, o), bp = mp_inverse(b, o), abp = mp_inverse(ab, o);
    const DenseTensor rev = tprod(bp, ap);
    v.check(max_abs_diff(ap, load("revorder_a_pinv")) <= 1e-10, "%s A+ max diff %.3g (<= 1e-10)", route_name(r),
            max_abs_diff(ap, load("revorder_a_pinv")));
    v.check(max_abs_diff(bp, load("revorder_b_pinv")) <= 1e-10, "%s B+ max diff %.3g (<= 1e-10)", route_name(r),
            max_abs_diff(bp, load("revorder_b_pinv")));
    v.check(max_abs_diff(abp, load("revorder_ab_pinv")) <= 1e-10, "%s (A*B)+ max diff %.3g (<= 1e-10)",
            route_name(r), max_abs_diff(abp, load("revorder_ab_pinv")));
    v.check(max_abs_diff(rev, load("revorder_b_pinv_a_pinv")) <= 1e-10, "%s B+*A+ max diff %.3g (<= 1e-10)",
            route_name(r), max_abs_diff(rev, load("revorder_b_pinv_a_pinv")));
    const double gap = relative_diff(rev, abp);
    v.check(gap >= 0.5, "%s reverse-order gap %.4f (>= 0.5)", route_name(r), gap);
  }
  const double elapsed = seconds_since(t0);
  v.check(elapsed < 1.0, "runtime %.3f s (< 1 s)", elapsed);
  return v;
}

Verdict one_sided_inverses() {
  Verdict v;
  constexpr double tol = 1e-10;
  // Conditions (1) and (k) of a candidate X for A.
  auto expect = [&](const char* what, const DenseTensor& a, const DenseTensor& x, int k) {
    const PenroseReport r = penrose_residuals(a, x);
    v.check(r.r1 <= tol && r.residual(k) <= tol, "%s: r1 %.3g, r%d %.3g (<= 1e-10)", what, r.r1, k, r.residual(k));
  };

  const DenseTensor a14 = load("onefour_a"), b14 = load("onefour_b");
  const DenseTensor a14_reference = load("onefour_a14_reference");
  expect("reference A{1,4}", a14, a14_reference, 4);
  expect("reference B{1,4} (= B)", b14, b14, 4);
  expect("computed A{1,4}", a14, one_four_inverse(a14), 4);
  expect("computed B{1,4}", b14, one_four_inverse(b14), 4);

  const DenseTensor a13 = load("onethree_a"), b13 = load("onethree_b");
  const DenseTensor a13_reference = load("onethree_a13_reference"), b13_reference = load("onethree_b13_reference");
  expect("reference A{1,3}", a13, a13_reference, 3);
  expect("reference B{1,3}", b13, b13_reference, 3);
  expect("computed A{1,3}", a13, one_three_inverse(a13), 3);
  expect("computed B{1,3}", b13, one_three_inverse(b13), 3);

  ReverseOrderInputs given14;
  given14.a14 = a14_reference;
  given14.b14 = b14;
  const ReverseOrderReport r14 = reverse_order_law_check(a14, b14, {}, given14);
  v.check(r14.cond14_asymmetry >= 1e-2 * r14.cond14_norm, "{1,4} condition tensor asymmetry %.4g vs norm %.4g",
          r14.cond14_asymmetry, r14.cond14_norm);
  v.check(max_abs_diff(r14.cond14, load("onefour_condition_reference")) <= 1e-10,
          "{1,4} condition tensor vs reference: max diff %.3g", max_abs_diff(r14.cond14, load("onefour_condition_reference")));

  ReverseOrderInputs given13;
  given13.a13 = a13_reference;
  given13.b13 = b13_reference;
  const ReverseOrderReport r13 = reverse_order_law_check(a13, b13, {}, given13);
  v.check(r13.cond13_asymmetry >= 1e-2 * r13.cond13_norm, "{1,3} condition tensor asymmetry %.4g vs norm %.4g",
          r13.cond13_asymmetry, r13.cond13_norm);
  v.check(max_abs_diff(r13.cond13, load("onethree_condition_reference")) <= 1e-10,
          "{1,3} condition tensor vs reference: max diff %.3g", max_abs_diff(r13.cond13, load("onethree_condition_reference")));
  v.check(r13.reversed13_valid, "B{1,3}*A{1,3} is a {1,3}-inverse of A*B despite the asymmetric condition: r1 %.3g, r3 %.3g",
          r13.reversed13.r1, r13.reversed13.r3);

  // The computed {1,4} pair: condition holds, so the reversed product is valid.
  const ReverseOrderReport own14 = reverse_order_law_check(a14, b14);
  v.details.push_back("info computed {1,4} pair: condition asymmetry " + std::to_string(own14.cond14_asymmetry) +
                      ", reversed product valid " + (own14.reversed14_valid ? "true" : "false"));
  return v;
}

Verdict weighted_inverse() {
  Verdict v;
  const DenseTensor a = load("weighted_a"), m = load("weighted_m"), n = load("weighted_n");
  const WeightPair w(m, n);
  for (InverseRoot root : {InverseRoot::sqrt_of_inverse, InverseRoot::inverse_of_sqrt}) {
    const char* name = root == InverseRoot::sqrt_of_inverse ? "sqrt-of-inverse" : "inverse-of-sqrt";
    const DenseTensor y = weighted_mp_inverse(a, w, {}, root);
    const double d = max_abs_diff(y, load("weighted_result_reference"));
    v.check(d <= 5e-4, "%s: max diff to reference weighted inverse %.4g (<= 5e-4)", name, d);
    const PenroseReport r = weighted_residuals(a, y, w, 1e-9);
    v.check(r.all(), "%s: weighted residuals %.3g %.3g %.3g %.3g (<= 1e-9)", name, r.r1, r.r2, r.r3, r.r4);
    v.details.push_back(std::string("info ") + name + ": distance to the t-inverse of A " +
                        std::to_string(max_abs_diff(y, t_inverse(a))));
  }
  const PenroseReport reference = weighted_residuals(a, load("weighted_result_reference"), w, 1e-9);
  v.details.push_back("info reference weighted inverse residuals: " + std::to_string(reference.r1) + " " +
                      std::to_string(reference.r2) + " " + std::to_string(reference.r3) + " " +
                      std::to_string(reference.r4));
  const double ds = max_abs_diff(spd_sqrt(m), load("weighted_m_sqrt_reference"));
  v.check(ds <= 5e-4, "square root of M: max diff to reference %.3g (<= 5e-4)", ds);
  return v;
}

Verdict ring_examples() {
  Verdict v;
  using ring::RingElem;
  const RingElem g = ring::group_inverse(RingElem{1, 0, -1});
  const double dg = max_diff(g, RingElem{1.0 / 3, -1.0 / 3, 0});
  v.check(dg <= 1e-12, "group inverse of (1,0,-1): max diff to (1/3,-1/3,0) %.3g", dg);

  const auto bc = ring::bc_inverse(RingElem{0, 1}, RingElem{1, 0}, RingElem{0, 1});
  v.check(bc && max_diff(*bc, RingElem{0, 1}) <= 1e-12, "(b,c)-inverse example: %s",
          bc ? ("(" + std::to_string((*bc)[0]) + ", " + std::to_string((*bc)[1]) + ")").c_str() : "does not exist");

  const RingElem ann_b{1, -1, 0};
  const auto ann = ring::annihilator_bc_inverse(RingElem{2.0 / 3, 1.0 / 3, 0}, ann_b, ann_b);
  v.check(ann && max_diff(*ann, RingElem{1, -1, 0}) <= 1e-12, "annihilator (b,c)-inverse example: max diff %.3g",
          ann ? max_diff(*ann, RingElem{1, -1, 0}) : INFINITY);

  const RingElem zero = ring::ring_mul(RingElem{2, 2, 2}, RingElem{1, -1, 0});
  const bool exact = std::all_of(zero.values().begin(), zero.values().end(), [](double x) { return x == 0.0; });
  v.check(exact && ring::is_zero_divisor(RingElem{2, 2, 2}), "zero-divisor example: product is exactly zero");
  return v;
}

Verdict oracle_equivalence() {
  Verdict v;
  oracle::Rng rng(2024);
  double worst3 = 0.0;
  for (int t = 0; t < 200; ++t) {
    const std::size_t n1 = oracle::uniform_index(1, 4, rng), n2 = oracle::uniform_index(1, 4, rng);
    const std::size_t n4 = oracle::uniform_index(1, 4, rng), n3 = oracle::uniform_index(1, 4, rng);
    const DenseTensor a = oracle::random_tensor({n1, n2, n3}, rng);
    const DenseTensor b = oracle::random_tensor({n2, n4, n3}, rng);
    worst3 = std::max(worst3, max_abs_diff(tprod(a, b), oracle::tprod_bcirc(a, b)));
  }
  v.check(worst3 <= 1e-10, "200 order-3 cases vs block-circulant product: worst %.3g (<= 1e-10)", worst3);

  double worst4 = 0.0;
  for (int t = 0; t < 50; ++t) {
    std::size_t n3 = 0, n4 = 0;
    do {
      n3 = oracle::uniform_index(1, 4, rng);
      n4 = oracle::uniform_index(1, 4, rng);
    } while (n3 * n4 > 9);
    const std::size_t n1 = oracle::uniform_index(1, 4, rng), n2 = oracle::uniform_index(1, 4, rng);
    const std::size_t nc = oracle::uniform_index(1, 4, rng);
    const DenseTensor a = oracle::random_tensor({n1, n2, n3, n4}, rng);
    const DenseTensor b = oracle::random_tensor({n2, nc, n3, n4}, rng);
    worst4 = std::max(worst4, max_abs_diff(tprod(a, b), oracle::tprod_recursive(a, b)));
  }
  v.check(worst4 <= 1e-10, "50 order-4 cases vs recursive definition: worst %.3g (<= 1e-10)", worst4);
  return v;
}

Verdict penrose_suite() {
  Verdict v;
  constexpr double tol = 1e-8;
  const auto t0 = Clock::now();
  oracle::Rng rng(31);
  struct Tally {
    double penrose = 0, involution = 0, identities = 0;
    int failures = 0;
  };
  Tally tally[2];
  for (int t = 0; t < 500; ++t) {
    const std::size_t n1 = oracle::uniform_index(1, 4, rng), n2 = oracle::uniform_index(1, 4, rng);
    Dims trailing{oracle::uniform_index(1, 6, rng)};
    if (t % 2 == 1 && trailing[0] <= 3) trailing.push_back(2);
    const DenseTensor a = oracle::random_rank_deficient(n1, n2, trailing, rng);
    for (Route r : {Route::cholesky, Route::svd}) {
      Tally& s = tally[r == Route::svd];
      const InverseOptions o = on_route(r);
      const DenseTensor x = mp_inverse(a, o);
      const PenroseReport p = penrose_residuals(a, x, tol);
      const double pen = std::max({p.r1, p.r2, p.r3, p.r4});
      const MpIdentityReport id = mp_identity_suite(a, o);
      const double ident = std::max({id.gram_left, id.gram_right, id.via_left, id.via_right, id.transpose});
      s.penrose = std::max(s.penrose, pen);
      s.involution = std::max(s.involution, id.involution);
      s.identities = std::max(s.identities, ident);
      if (pen > tol || id.involution > tol || ident > tol) ++s.failures;
    }
  }
  for (Route r : {Route::cholesky, Route::svd}) {
    const Tally& s = tally[r == Route::svd];
    v.check(s.failures == 0,
            "%s route: %d of 500 tensors fail; worst Penrose %.3g, involution %.3g, identities %.3g (<= 1e-8)",
            route_name(r), s.failures, s.penrose, s.involution, s.identities);
  }
  const double elapsed = seconds_since(t0);
  v.check(elapsed < 60.0, "runtime %.2f s (< 60 s)", elapsed);
  return v;
}

Verdict deblur_round_trip() {
  Verdict v;
  const auto t0 = Clock::now();
  const DenseTensor image = io::read_ppm((kFixtures / "gradient_128.ppm").string());
  const deblur::BlurModel model = deblur::build_blur_model(128, 4.0, 6, {0.8, 0.1, 0.1});
  const deblur::Reconstruction rec = deblur::prepare_reconstruction(model);
  v.check(rec.penrose_A.all() && rec.penrose_C.all(), "Penrose residuals of both blur inverses pass");

  const DenseTensor clean = deblur::apply_reconstruction(rec, deblur::blur(image, model, 0.0, 0));
  const double rel = deblur::rel_error(clean, image);
  v.check(rel <= 1e-5, "noiseless rel_error %.3g (<= 1e-5)", rel);

  const std::vector<double> noise{0.0, 1e-5, 1e-4, 1e-3};
  for (std::uint64_t seed : {7u, 8u, 9u}) {
    std::vector<double> psnr;
    for (double var : noise) {
      const DenseTensor est = deblur::apply_reconstruction(rec, deblur::blur(image, model, var, seed));
      psnr.push_back(deblur::psnr(est, image));
    }
    const bool finite = std::isfinite(psnr.back());
    const bool monotone = std::is_sorted(psnr.rbegin(), psnr.rend()) &&
                          std::adjacent_find(psnr.begin(), psnr.end()) == psnr.end();
    v.check(finite && monotone, "seed %llu: PSNR %.4g, %.4g, %.4g, %.4g dB for noise 0, 1e-5, 1e-4, 1e-3",
            static_cast<unsigned long long>(seed), psnr[0], psnr[1], psnr[2], psnr[3]);
  }
  const double elapsed = seconds_since(t0);
  v.check(elapsed < 120.0, "runtime %.2f s (< 120 s)", elapsed);
  return v;
}

Verdict scaling() {
  Verdict v;
  oracle::Rng rng(77);
  const std::vector<std::size_t> sizes{32, 64, 128};
  std::vector<double> median;
  for (std::size_t n : sizes) {
    const DenseTensor a = oracle::random_tensor({n, n, 8}, rng);
    std::vector<double> times;
    for (int rep = 0; rep < 5; ++rep) {
      const auto t0 = Clock::now();
      const DenseTensor x = mp_inverse(a);
      times.push_back(seconds_since(t0));
      if (x.size() == 0) return v;
    }
    std::nth_element(times.begin(), times.begin() + 2, times.end());
    median.push_back(times[2]);
    v.details.push_back("info n=" + std::to_string(n) + ": median " + std::to_string(median.back()) + " s");
  }
  for (std::size_t i = 1; i < sizes.size(); ++i) {
    const double cube = std::pow(static_cast<double>(sizes[i]) / static_cast<double>(sizes[0]), 3);
    const double growth = median[i] / median[0];
    v.check(growth <= 2.0 * cube, "n=%zu vs n=%zu: time ratio %.3g (<= 2 x %.0f)", sizes[i], sizes[0], growth, cube);
  }
  return v;
}

struct Criterion {
  int id;
  const char* title;
  std::function<Verdict()> run;
};

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"tpinv acceptance suite"};
  int only = 0;
  app.add_option("--criterion", only, "run a single criterion (1-8); default runs all")->check(CLI::Range(0, 8));
  CLI11_PARSE(app, argc, argv);

  const std::vector<Criterion> criteria{
      {1, "reverse-order example inverses and gap", reverse_order_failure},
      {2, "reference {1,4} and {1,3} inverses and asymmetric conditions", one_sided_inverses},
      {3, "weighted inverse and SPD square root", weighted_inverse},
      {4, "circulant ring examples", ring_examples},
      {5, "t-product oracle equivalence", oracle_equivalence},
      {6, "Penrose property suite on 500 random tensors", penrose_suite},
      {7, "deblur round trip and noise degradation", deblur_round_trip},
      {8, "runtime scaling across n x n x 8", scaling},
  };

  bool all = true;
  for (const Criterion& c : criteria) {
    if (only != 0 && c.id != only) continue;
    Verdict v;
    try {
      v = c.run();
    } catch (const std::exception& e) {
      v.pass = false;
      v.details.push_back(std::string("FAIL exception: ") + e.what());
    }
    std::cout << "criterion " << c.id << ": " << (v.pass ? "PASS" : "FAIL") << "  " << c.title << '\n';
    for (const auto& d : v.details) std::cout << "    " << d << '\n';
    std::cout.flush();
    all = all && v.pass;
  }
  return all ? 0 : 1;
}
