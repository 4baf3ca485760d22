// Acceptance run: one PASS/FAIL line per criterion, exit status 0 only when
// every criterion holds.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "besovop/besov.hpp"
#include "besovop/error.hpp"
#include "besovop/kernel.hpp"
#include "besovop/random.hpp"
#include "besovop/spectral.hpp"
#include "besovop/wavelet.hpp"
#include "cli.hpp"

using namespace besovop;
namespace fs = std::filesystem;

namespace {

struct Verdict {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

std::vector<double> gaussian_vector(Rng& rng, std::size_t n) {
  std::vector<double> v(n);
  for (double& x : v) x = rng.normal();
  return v;
}

double pyramid_energy(const WaveletPyramid& p) {
  long double s = 0.0L;
  for (double v : p.scaling.data()) s += static_cast<long double>(v) * v;
  for (const auto& d : p.details)
    for (double v : d.data()) s += static_cast<long double>(v) * v;
  return static_cast<double>(s);
}

Verdict transform_soundness() {
  const auto start = std::chrono::steady_clock::now();
  double worst_round = 0.0, worst_parseval = 0.0, worst_poly = 0.0;
  for (int n = 1; n <= kMaxVanishingMoments; ++n) {
    const WaveletFilter f = build_filter(WaveletFamily::Daubechies, n);
    const std::size_t taps = f.lowpass.size();
    for (int levels = 4; levels <= 14; ++levels) {
      const std::size_t len = std::size_t{1} << levels;
      Rng rng(derive_seed(static_cast<std::uint64_t>(100 * n + levels), "acceptance-dwt"));
      const std::vector<double> x = gaussian_vector(rng, len);
      const WaveletPyramid p = forward_dwt(x, f, 0);
      const std::vector<double> y = inverse_dwt(p, f);
      long double energy = 0.0L;
      double peak = 0.0, diff = 0.0;
      for (std::size_t i = 0; i < len; ++i) {
        energy += static_cast<long double>(x[i]) * x[i];
        peak = std::max(peak, std::abs(x[i]));
        diff = std::max(diff, std::abs(x[i] - y[i]));
      }
      worst_round = std::max(worst_round, diff / peak);
      worst_parseval = std::max(worst_parseval, std::abs(pyramid_energy(p) - static_cast<double>(energy)) /
                                                    static_cast<double>(energy));

      // Atoms at level j span at most taps * 2^{levels-j} samples, so
      // translations at least taps + 1 away from either end never wrap.
      const std::size_t margin = taps + 1;
      for (int degree = 0; degree < n; ++degree) {
        std::vector<double> poly(len);
        double scale = 0.0;
        for (std::size_t i = 0; i < len; ++i) {
          const double t = static_cast<double>(i) / static_cast<double>(len) - 0.5;
          poly[i] = std::pow(t, degree);
          scale = std::max(scale, std::abs(poly[i]));
        }
        const WaveletPyramid q = forward_dwt(poly, f, 0);
        for (int j = 0; j < levels; ++j) {
          const Matrix& d = q.detail(j);
          if (d.rows() <= 2 * margin) continue;
          for (std::size_t k = margin; k + margin < d.rows(); ++k)
            worst_poly = std::max(worst_poly, std::abs(d(k, 0)) / scale);
        }
      }
    }
  }
  const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  Verdict v;
  v.pass = worst_round <= 1e-10 && worst_parseval <= 1e-10 && worst_poly <= 1e-8 && seconds < 10.0;
  v.detail = "round trip " + fmt("%.2e", worst_round) + ", Parseval " + fmt("%.2e", worst_parseval) +
             ", annihilation " + fmt("%.2e", worst_poly) + ", " + fmt("%.2f", seconds) + " s";
  return v;
}

Verdict hilbert_schmidt_anchor() {
  double worst = 0.0;
  for (std::uint64_t seed = 1; seed <= 50; ++seed) {
    Rng rng(derive_seed(seed, "acceptance-hs"));
    const DyadicGrid gx{3 + static_cast<int>(seed % 4), 0.0, 1.0 + static_cast<double>(seed % 3)};
    const DyadicGrid gy{3 + static_cast<int>((seed / 4) % 4), -0.5, 0.5 + static_cast<double>(seed % 5)};
    SampledKernel k{gx, gy, Matrix(gx.point_count(), gy.point_count()), "hs"};
    for (double& v : k.values.data()) v = rng.normal();
    long double grid = 0.0L, frob = 0.0L;
    for (double v : k.values.data()) grid += static_cast<long double>(v) * v;
    grid *= static_cast<long double>(gx.spacing()) * gy.spacing();
    const DiscreteOperator op = discretize(k);
    for (double v : op.matrix.data()) frob += static_cast<long double>(v) * v;
    const double g = std::sqrt(static_cast<double>(grid)), fr = std::sqrt(static_cast<double>(frob));
    worst = std::max(worst, std::abs(fr - g) / g);
  }
  return {worst <= 1e-12, "50 kernels, worst relative gap " + fmt("%.2e", worst)};
}

std::vector<double> norms_of(const CoefficientField& f) {
  std::vector<double> out;
  for (const auto& c : coefficient_norms(f, ValueNorm::L2)) out.push_back(c.norm);
  return out;
}

Verdict greedy_optimality() {
  const WaveletFilter f = build_filter(WaveletFamily::Daubechies, 2);
  const DyadicGrid gx{4, 0.0, 1.0}, gy{2, 0.0, 1.0};
  double worst = 0.0;
  std::size_t subsets = 0;
  bool shape_ok = true;
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    Rng rng(derive_seed(seed, "acceptance-greedy"));
    SampledKernel k{gx, gy, Matrix(16, 4), "greedy"};
    for (double& v : k.values.data()) v = rng.normal();
    const CoefficientField field = analyze_kernel(k, f, 2);
    const std::vector<double> b = norms_of(field);
    if (b.size() != 12) {
      shape_ok = false;
      continue;
    }
    double best = INFINITY;
    subsets = 0;
    for (unsigned mask = 0; mask < (1u << 12); ++mask) {
      if (__builtin_popcount(mask) != 4) continue;
      ++subsets;
      double e = 0.0;
      for (std::size_t i = 0; i < 12; ++i)
        if (!(mask & (1u << i))) e += b[i] * b[i];
      best = std::min(best, std::sqrt(e));
    }
    const CoefficientField g = greedy_n_term(field, 4, ValueNorm::L2);
    double e = 0.0;
    for (std::size_t l = 0; l < field.details.size(); ++l)
      for (std::size_t i = 0; i < field.details[l].size(); ++i) {
        const double d = field.details[l].data()[i] - g.details[l].data()[i];
        e += d * d;
      }
    worst = std::max(worst, std::abs(std::sqrt(e * field.y_spacing()) - best));
  }
  return {shape_ok && subsets == 495 && worst <= 1e-12,
          "20 fields, " + std::to_string(subsets) + " subsets each, worst gap " + fmt("%.2e", worst)};
}

Verdict suite(const std::string& name, const std::function<void(cli::RunConfig&)>& setup) {
  cli::RunConfig c;
  c.command = "verify";
  c.suite = name;
  setup(c);
  const cli::SuiteResult r = cli::run_suite(c);
  std::string detail = "worst_ratio ";
  const auto& w = r.report["worst_ratio"];
  detail += w.is_number() ? fmt("%.6g", w.get<double>()) : w.dump();
  detail += ", " + std::to_string(r.report["cases"].size()) + " cases";
  for (const auto& f : r.report["failures"]) detail += "; " + f.dump();
  return {r.pass, detail};
}

std::map<std::string, std::string> snapshot(const fs::path& dir) {
  std::map<std::string, std::string> out;
  for (const auto& e : fs::recursive_directory_iterator(dir)) {
    if (!e.is_regular_file()) continue;
    std::ifstream in(e.path(), std::ios::binary);
    std::ostringstream s;
    s << in.rdbuf();
    out[fs::relative(e.path(), dir).string()] = s.str();
  }
  return out;
}

Verdict determinism() {
  const fs::path dir = fs::temp_directory_path() / "besovop_acceptance_determinism";
  fs::remove_all(dir);
  fs::create_directories(dir);
  const std::string out = dir.string();
  const std::string kernel = (dir / "wavelet_synthetic.kernel").string();
  const std::vector<std::vector<std::string>> commands{
      {"filters"},
      {"filters", "--format", "csv"},
      {"synth", "--family", "wavelet_synthetic", "--alpha", "1", "--p", "1", "--seed", "13", "-J", "8"},
      {"synth", "--family", "fractional_rough", "--alpha", "0.75", "--seed", "9", "-J", "6"},
      {"dwt", "--kernel", kernel},
      {"besov", "--kernel", kernel, "--p", "1"},
      {"spectrum", "--kernel", kernel, "--p", "1"},
      {"schur", "--family", "separable_gaussian", "-J", "4", "--p", "0.5"},
      {"verify", "hardy", "--profile", "all"},
      {"verify", "mu_estimate", "--seeds", "1..10", "-J", "5"}};
  std::ostringstream sink;
  std::map<std::string, std::string> first;
  bool ok = true;
  for (int pass = 0; pass < 2; ++pass) {
    for (auto args : commands) {
      args.insert(args.begin(), "besovop");
      args.push_back("--out");
      args.push_back(out);
      std::vector<const char*> argv;
      for (const auto& a : args) argv.push_back(a.c_str());
      if (cli::run(static_cast<int>(argv.size()), argv.data(), sink, sink) != 0) ok = false;
    }
    if (pass == 0) {
      first = snapshot(dir);
      fs::remove_all(dir);
      fs::create_directories(dir);
    }
  }
  const auto second = snapshot(dir);
  std::size_t differing = 0;
  for (const auto& [name, bytes] : first) {
    const auto it = second.find(name);
    if (it == second.end() || it->second != bytes) ++differing;
  }
  fs::remove_all(dir);
  ok = ok && differing == 0 && first.size() == second.size() && !first.empty();
  return {ok, std::to_string(first.size()) + " artifacts, " + std::to_string(differing) + " differ"};
}

}  // namespace

int main() {
  struct Criterion {
    const char* name;
    std::function<Verdict()> run;
  };
  const std::vector<Criterion> criteria{
      {"transform soundness", transform_soundness},
      {"Hilbert-Schmidt anchor", hilbert_schmidt_anchor},
      {"mu-estimate", [] { return suite("mu_estimate", [](cli::RunConfig& c) {
                              c.seed_first = 1;
                              c.seed_last = 100;
                              c.n = 32;
                            }); }},
      {"l_{p,q} equivalence", [] { return suite("lpq", [](cli::RunConfig&) {}); }},
      {"greedy n-term optimality", greedy_optimality},
      {"nonlinear two-sidedness", [] { return suite("nonlinear", [](cli::RunConfig& c) { c.levels = 7; }); }},
      {"main embedding and decay", [] { return suite("main_embedding", [](cli::RunConfig& c) { c.levels = 7; }); }},
      {"Schur soundness", [] { return suite("schur", [](cli::RunConfig& c) {
                                  c.levels = 5;
                                  c.seed_first = 1;
                                  c.seed_last = 20;
                                }); }},
      {"Hardy lemma", [] { return suite("hardy", [](cli::RunConfig& c) {
                              c.profile = "all";
                              c.seed_first = 1;
                              c.seed_last = 20;
                            }); }},
      {"determinism", determinism},
  };

  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    const auto start = std::chrono::steady_clock::now();
    Verdict v;
    try {
      v = criteria[i].run();
    } catch (const std::exception& e) {
      v = {false, std::string("exception: ") + e.what()};
    }
    const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (!v.pass) ++failed;
    std::printf("%s %2zu %s: %s [%.1f s]\n", v.pass ? "PASS" : "FAIL", i + 1, criteria[i].name, v.detail.c_str(),
                seconds);
    std::fflush(stdout);
  }
  std::printf("%d of %zu criteria failed\n", failed, criteria.size());
  return failed == 0 ? 0 : 1;
}
