#include "tpinv/cli.hpp"

#include <chrono>
#include <cmath>
#include <fstream>
#include <functional>
#include <map>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "tpinv/circ_ring.hpp"
#include "tpinv/deblur.hpp"
#include "tpinv/error.hpp"
#include "tpinv/gen_inverse.hpp"
#include "tpinv/io.hpp"
#include "tpinv/tensor.hpp"

namespace tpinv::cli {

namespace {

using io::format_double;

const std::map<std::string, Route> kRoutes{{"cholesky", Route::cholesky}, {"svd", Route::svd}};
const std::map<std::string, InverseRoot> kRoots{{"sqrt-of-inverse", InverseRoot::sqrt_of_inverse},
                                                {"inverse-of-sqrt", InverseRoot::inverse_of_sqrt}};

// Flags shared by the inverse subcommands.
struct InverseFlags {
  std::optional<double> eps;
  Route route = Route::cholesky;
  bool verify = false;
  bool no_fallback = false;
  double residual_tol = 1e-8;

  void attach(CLI::App* app, bool with_route = true) {
    app->add_option("--eps", eps, "relative rank tolerance per spectral block")
        ->check(CLI::NonNegativeNumber);
    if (with_route) {
      app->add_option("--route", route, "cholesky or svd")
          ->transform(CLI::CheckedTransformer(kRoutes, CLI::ignore_case));
      app->add_flag("--verify", verify, "check the Penrose conditions and fail if they do not hold");
      app->add_flag("--no-fallback", no_fallback, "do not retry on the SVD route");
    }
    app->add_option("--residual-tol", residual_tol, "tolerance of Penrose checks")
        ->check(CLI::NonNegativeNumber);
  }

  InverseOptions options(unsigned workers) const {
    InverseOptions o;
    o.route = route;
    o.rank_tol = eps;
    o.verify = verify;
    o.allow_fallback = !no_fallback;
    o.residual_tol = residual_tol;
    o.workers = workers;
    return o;
  }
};

void print_penrose(std::ostream& out, const PenroseReport& r) {
  for (int k = 1; k <= 4; ++k) {
    out << 'r' << k << ' ' << format_double(r.residual(k)) << ' ' << (r.pass[k - 1] ? "pass" : "fail")
        << '\n';
  }
  out << "all " << (r.all() ? "pass" : "fail") << '\n';
}

void print_elem(std::ostream& out, const ring::RingElem& x) {
  for (std::size_t i = 0; i < x.size(); ++i) out << (i ? " " : "") << format_double(x[i]);
  out << '\n';
}

void print_value(std::ostream& out, const char* key, double v) {
  out << key << ' ' << format_double(v) << '\n';
}

void print_flag(std::ostream& out, const char* key, bool v) {
  out << key << ' ' << (v ? "true" : "false") << '\n';
}

ring::RingElem require_elem(const std::vector<double>& v, const char* name) {
  if (v.empty()) throw DomainError(std::string("ring operation needs --") + name);
  return ring::RingElem(v);
}

nlohmann::json penrose_json(const PenroseReport& r) { return {r.r1, r.r2, r.r3, r.r4}; }

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Tensor generalized inverses under the t-product"};
  app.require_subcommand(1);
  unsigned workers = 1;
  app.add_option("--workers", workers, "threads for per-block work")->check(CLI::PositiveNumber);

  std::function<void()> action;

  // tprod
  std::string a_path, b_path, out_path;
  auto* tprod_cmd = app.add_subcommand("tprod", "t-product A*B");
  tprod_cmd->add_option("a", a_path)->required();
  tprod_cmd->add_option("b", b_path)->required();
  tprod_cmd->add_option("out", out_path)->required();
  tprod_cmd->callback([&] {
    action = [&] { io::write_tns(out_path, tprod(io::read_tns(a_path), io::read_tns(b_path), workers)); };
  });

  // transpose
  auto* transpose_cmd = app.add_subcommand("transpose", "tensor transpose");
  transpose_cmd->add_option("in", a_path)->required();
  transpose_cmd->add_option("out", out_path)->required();
  transpose_cmd->callback([&] {
    action = [&] { io::write_tns(out_path, ttranspose(io::read_tns(a_path))); };
  });

  // pinv, inv13, inv14
  InverseFlags pinv_flags;
  auto* pinv_cmd = app.add_subcommand("pinv", "Moore-Penrose inverse");
  pinv_cmd->add_option("in", a_path)->required();
  pinv_cmd->add_option("out", out_path)->required();
  pinv_flags.attach(pinv_cmd);
  pinv_cmd->callback([&] {
    action = [&] { io::write_tns(out_path, mp_inverse(io::read_tns(a_path), pinv_flags.options(workers))); };
  });

  InverseFlags one_sided_flags;
  double free_value = 0.0;
  auto* inv13_cmd = app.add_subcommand("inv13", "{1,3}-inverse");
  inv13_cmd->add_option("in", a_path)->required();
  inv13_cmd->add_option("out", out_path)->required();
  one_sided_flags.attach(inv13_cmd, false);
  inv13_cmd->callback([&] {
    action = [&] {
      io::write_tns(out_path, one_three_inverse(io::read_tns(a_path), one_sided_flags.options(workers)));
    };
  });
  auto* inv14_cmd = app.add_subcommand("inv14", "{1,4}-inverse");
  inv14_cmd->add_option("in", a_path)->required();
  inv14_cmd->add_option("out", out_path)->required();
  one_sided_flags.attach(inv14_cmd, false);
  inv14_cmd->callback([&] {
    action = [&] {
      io::write_tns(out_path, one_four_inverse(io::read_tns(a_path), one_sided_flags.options(workers)));
    };
  });

  // innerinv
  InverseFlags inner_flags;
  auto* inner_cmd = app.add_subcommand("innerinv", "inner inverse from reduced row echelon forms");
  inner_cmd->add_option("in", a_path)->required();
  inner_cmd->add_option("out", out_path)->required();
  inner_cmd->add_option("--free", free_value, "value of every entry of the free block (0 gives a {1,2}-inverse)");
  inner_flags.attach(inner_cmd, false);
  inner_cmd->callback([&] {
    action = [&] {
      InverseOptions o = inner_flags.options(workers);
      o.inner_free_value = free_value;
      io::write_tns(out_path, inner_inverse(io::read_tns(a_path), o));
    };
  });

  // sqrt
  double spd_tol = 1e-12;
  auto* sqrt_cmd = app.add_subcommand("sqrt", "square root of a symmetric positive definite tensor");
  sqrt_cmd->add_option("in", a_path)->required();
  sqrt_cmd->add_option("out", out_path)->required();
  sqrt_cmd->add_option("--spd-tol", spd_tol, "relative eigenvalue floor")->check(CLI::NonNegativeNumber);
  sqrt_cmd->callback([&] {
    action = [&] {
      InverseOptions o;
      o.spd_tol = spd_tol;
      o.workers = workers;
      io::write_tns(out_path, spd_sqrt(io::read_tns(a_path), o));
    };
  });

  // wpinv
  std::string m_path, n_path;
  InverseRoot root = InverseRoot::sqrt_of_inverse;
  InverseFlags w_flags;
  auto* wpinv_cmd = app.add_subcommand("wpinv", "weighted Moore-Penrose inverse");
  wpinv_cmd->add_option("a", a_path)->required();
  wpinv_cmd->add_option("m", m_path)->required();
  wpinv_cmd->add_option("n", n_path)->required();
  wpinv_cmd->add_option("out", out_path)->required();
  wpinv_cmd->add_option("--root", root, "sqrt-of-inverse or inverse-of-sqrt")
      ->transform(CLI::CheckedTransformer(kRoots, CLI::ignore_case));
  wpinv_cmd->add_option("--spd-tol", spd_tol)->check(CLI::NonNegativeNumber);
  w_flags.attach(wpinv_cmd);
  wpinv_cmd->callback([&] {
    action = [&] {
      const WeightPair w(io::read_tns(m_path), io::read_tns(n_path), spd_tol);
      InverseOptions o = w_flags.options(workers);
      o.spd_tol = spd_tol;
      io::write_tns(out_path, weighted_mp_inverse(io::read_tns(a_path), w, o, root));
    };
  });

  // verify
  std::string x_path;
  double verify_tol = 1e-8;
  std::vector<std::string> weight_paths;
  auto* verify_cmd = app.add_subcommand("verify", "Penrose residuals of X as an inverse of A");
  verify_cmd->add_option("a", a_path)->required();
  verify_cmd->add_option("x", x_path)->required();
  verify_cmd->add_option("--tol", verify_tol)->check(CLI::NonNegativeNumber);
  verify_cmd->add_option("--weights", weight_paths, "M and N for the weighted conditions")->expected(2);
  verify_cmd->callback([&] {
    action = [&] {
      const DenseTensor a = io::read_tns(a_path), x = io::read_tns(x_path);
      if (weight_paths.empty()) {
        print_penrose(out, penrose_residuals(a, x, verify_tol, workers));
      } else {
        const WeightPair w(io::read_tns(weight_paths[0]), io::read_tns(weight_paths[1]));
        print_penrose(out, weighted_residuals(a, x, w, verify_tol));
      }
    };
  });

  // reverse
  std::string a13_path, b13_path, a14_path, b14_path;
  InverseFlags rev_flags;
  auto* reverse_cmd = app.add_subcommand("reverse", "reverse-order law report for A*B");
  reverse_cmd->add_option("a", a_path)->required();
  reverse_cmd->add_option("b", b_path)->required();
  reverse_cmd->add_option("--a13", a13_path, "given {1,3}-inverse of A");
  reverse_cmd->add_option("--b13", b13_path, "given {1,3}-inverse of B");
  reverse_cmd->add_option("--a14", a14_path, "given {1,4}-inverse of A");
  reverse_cmd->add_option("--b14", b14_path, "given {1,4}-inverse of B");
  rev_flags.attach(reverse_cmd);
  reverse_cmd->callback([&] {
    action = [&] {
      ReverseOrderInputs given;
      const auto load = [](const std::string& p) -> std::optional<DenseTensor> {
        if (p.empty()) return std::nullopt;
        return io::read_tns(p);
      };
      given.a13 = load(a13_path);
      given.b13 = load(b13_path);
      given.a14 = load(a14_path);
      given.b14 = load(b14_path);
      const auto rep =
          reverse_order_law_check(io::read_tns(a_path), io::read_tns(b_path), rev_flags.options(workers), given);
      print_value(out, "cond14_asymmetry", rep.cond14_asymmetry);
      print_value(out, "cond14_norm", rep.cond14_norm);
      print_value(out, "cond13_asymmetry", rep.cond13_asymmetry);
      print_value(out, "cond13_norm", rep.cond13_norm);
      print_flag(out, "reversed14_valid", rep.reversed14_valid);
      print_flag(out, "reversed13_valid", rep.reversed13_valid);
      print_value(out, "reversed14_gap", rep.reversed14_gap);
      print_value(out, "reversed13_gap", rep.reversed13_gap);
      print_value(out, "mp_gap", rep.mp_gap);
      print_flag(out, "mp_reverse_holds", rep.mp_reverse_holds);
    };
  });

  // identities
  InverseFlags id_flags;
  auto* id_cmd = app.add_subcommand("identities", "Moore-Penrose identity residuals");
  id_cmd->add_option("a", a_path)->required();
  id_flags.attach(id_cmd);
  id_cmd->callback([&] {
    action = [&] {
      const auto r = mp_identity_suite(io::read_tns(a_path), id_flags.options(workers));
      print_value(out, "gram_left", r.gram_left);
      print_value(out, "gram_right", r.gram_right);
      print_value(out, "via_left", r.via_left);
      print_value(out, "via_right", r.via_right);
      print_value(out, "involution", r.involution);
      print_value(out, "transpose", r.transpose);
      print_value(out, "normality", r.normality);
      print_flag(out, "normal", r.normal);
      print_value(out, "commutation", r.commutation);
      print_value(out, "partial_isometry", r.partial_isometry);
      print_value(out, "transpose_gap", r.transpose_gap);
    };
  });

  // ring
  std::string op;
  std::vector<double> ra, rb, rc;
  std::optional<double> ring_tol;
  auto* ring_cmd = app.add_subcommand("ring", "circulant ring computations");
  ring_cmd->add_option("--op", op, "group, bc, annbc, leftann, rightann, mul or zerodiv")
      ->required()
      ->check(CLI::IsMember({"group", "bc", "annbc", "leftann", "rightann", "mul", "zerodiv"}));
  ring_cmd->add_option("--a", ra, "comma-separated coefficients")->delimiter(',');
  ring_cmd->add_option("--b", rb)->delimiter(',');
  ring_cmd->add_option("--c", rc)->delimiter(',');
  ring_cmd->add_option("--tol", ring_tol, "relative zero-support tolerance")->check(CLI::NonNegativeNumber);
  ring_cmd->callback([&] {
    action = [&] {
      const ring::RingElem a = require_elem(ra, "a");
      const auto print_opt = [&](const std::optional<ring::RingElem>& x) {
        if (x) {
          print_elem(out, *x);
        } else {
          out << "does not exist\n";
        }
      };
      if (op == "group") {
        print_elem(out, ring::group_inverse(a, ring_tol));
      } else if (op == "bc") {
        print_opt(ring::bc_inverse(a, require_elem(rb, "b"), require_elem(rc, "c"), ring_tol));
      } else if (op == "annbc") {
        print_opt(ring::annihilator_bc_inverse(a, require_elem(rb, "b"), require_elem(rc, "c"), ring_tol));
      } else if (op == "leftann") {
        print_opt(ring::left_ann_b_inverse(a, require_elem(rb, "b"), ring_tol));
      } else if (op == "rightann") {
        print_opt(ring::right_ann_c_inverse(a, require_elem(rc, "c"), ring_tol));
      } else if (op == "mul") {
        print_elem(out, ring::ring_mul(a, require_elem(rb, "b")));
      } else {
        print_flag(out, "zero_divisor", ring::is_zero_divisor(a, ring_tol));
      }
    };
  });

  // deblur
  std::size_t n = 0;
  double sigma = 4.0;
  std::size_t band = 6;
  std::vector<double> weights{0.8, 0.1, 0.1};
  double noise = 0.0;
  std::uint64_t seed = 0;
  std::string in_ppm, out_ppm, metrics_path, blurred_path;
  Route deblur_route = Route::svd;
  std::optional<double> truncation;
  bool ascii = false;
  auto* deblur_cmd = app.add_subcommand("deblur", "blur an image with the two-sided model and reconstruct it");
  deblur_cmd->add_option("in", in_ppm, "input PPM image")->required();
  deblur_cmd->add_option("out", out_ppm, "reconstructed PPM image")->required();
  deblur_cmd->add_option("--n", n, "image side; defaults to the input size");
  deblur_cmd->add_option("--sigma", sigma, "Gaussian blur width")->capture_default_str()->check(CLI::PositiveNumber);
  deblur_cmd->add_option("--band", band, "blur band half-width")->capture_default_str();
  deblur_cmd->add_option("--c", weights, "cross-channel weights c1,c2,c3")->delimiter(',')->expected(3);
  deblur_cmd->add_option("--noise", noise, "noise variance")->capture_default_str()->check(CLI::NonNegativeNumber);
  deblur_cmd->add_option("--seed", seed, "noise seed")->capture_default_str();
  deblur_cmd->add_option("--route", deblur_route, "cholesky or svd (default svd)")
      ->transform(CLI::CheckedTransformer(kRoutes, CLI::ignore_case));
  deblur_cmd->add_option("--truncate", truncation, "relative singular value cutoff (SVD route)")
      ->check(CLI::NonNegativeNumber);
  deblur_cmd->add_option("--blurred", blurred_path, "also save the blurred image");
  deblur_cmd->add_option("--metrics", metrics_path, "write metrics JSON");
  deblur_cmd->add_flag("--ascii", ascii, "write P3 instead of P6");
  deblur_cmd->callback([&] {
    action = [&] {
      const auto start = std::chrono::steady_clock::now();
      const DenseTensor x = io::read_ppm(in_ppm);
      if (x.rows() != x.cols()) throw ShapeError("deblur needs a square image");
      const std::size_t side = n ? n : x.rows();
      if (side != x.rows()) {
        throw ShapeError("--n " + std::to_string(side) + " does not match the " + std::to_string(x.rows()) +
                         "x" + std::to_string(x.cols()) + " image");
      }
      const auto model = deblur::build_blur_model(side, sigma, band, {weights[0], weights[1], weights[2]});
      const DenseTensor b = deblur::blur(x, model, noise, seed, workers);
      deblur::DeblurOptions opts;
      opts.inverse.route = deblur_route;
      opts.inverse.workers = workers;
      opts.truncation = truncation;
      const auto result = deblur::deblur(b, model, opts);
      const double elapsed = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();

      if (!blurred_path.empty()) io::write_ppm(blurred_path, b, !ascii);
      io::write_ppm(out_ppm, result.estimate, !ascii);
      const double psnr = deblur::psnr(result.estimate, x);
      const double rel = deblur::rel_error(result.estimate, x);
      print_value(out, "psnr_db", psnr);
      print_value(out, "rel_error", rel);
      if (!metrics_path.empty()) {
        nlohmann::json j;
        // JSON has no infinity; an exact reconstruction reports null.
        j["psnr_db"] = std::isfinite(psnr) ? nlohmann::json(psnr) : nlohmann::json(nullptr);
        j["rel_error"] = rel;
        j["penrose_A"] = penrose_json(result.penrose_A);
        j["penrose_C"] = penrose_json(result.penrose_C);
        j["elapsed_s"] = elapsed;
        std::ofstream f(metrics_path);
        if (!f) throw IoError("cannot open '" + metrics_path + "' for writing");
        f << j.dump(2) << '\n';
        if (!f) throw IoError("failed writing '" + metrics_path + "'");
      }
    };
  });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? ok : io_failure;
  }

  try {
    action();
    return ok;
  } catch (const IoError& e) {
    err << "error: " << e.what() << '\n';
    return io_failure;
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return domain_failure;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return domain_failure;
  }
}

}  // namespace tpinv::cli
