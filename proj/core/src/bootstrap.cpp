#include <cmath>
#include <random>
#include <sstream>

#include "rydstab/analysis.hpp"
#include "rydstab/error.hpp"
#include "rydstab/noise.hpp"
#include "rydstab/units.hpp"

namespace rydstab::analysis {

BootstrapResult bootstrap(const std::vector<FringeSample>& samples, const BootstrapOptions& options,
                          const Fitter& fitter) {
  if (samples.empty()) throw InvalidArgument("bootstrap: no samples");
  if (options.resamples < 2) throw InvalidArgument("bootstrap: need at least 2 resamples");
  if (!fitter) throw InvalidArgument("bootstrap: no fitter");

  BootstrapResult out;
  out.full_sample = fitter(samples);
  out.resamples = options.resamples;

  std::vector<double> contrast, offset, phase;
  std::vector<FringeSample> resampled = samples;
  for (int r = 0; r < options.resamples; ++r) {
    std::mt19937_64 rng(noise::stream_seed(options.seed, static_cast<std::uint64_t>(r),
                                           static_cast<std::uint64_t>(noise::Stream::kBootstrap), 0));
    for (std::size_t i = 0; i < samples.size(); ++i) {
      const FringeSample& s = samples[i];
      if (s.shots <= 0) continue;
      const double p = static_cast<double>(s.successes) / static_cast<double>(s.shots);
      const auto k = std::binomial_distribution<std::int64_t>(s.shots, p)(rng);
      resampled[i] = FringeSample::counts(s.phase_rad, k, s.shots);
    }
    try {
      const FringeFit f = fitter(resampled);
      if (!f.phase_defined) {
        ++out.failures;
        continue;
      }
      contrast.push_back(f.contrast);
      offset.push_back(f.offset);
      phase.push_back(f.phase);
    } catch (const Error&) {
      ++out.failures;
    }
  }
  if (out.failures > options.max_failure_fraction * options.resamples || contrast.size() < 2) {
    std::ostringstream msg;
    msg << "bootstrap: " << out.failures << " of " << options.resamples << " resampled fits failed";
    throw NumericalError(msg.str());
  }

  const auto n = static_cast<double>(contrast.size());
  auto mean_std = [n](const std::vector<double>& v) {
    double m = 0.0;
    for (double x : v) m += x;
    m /= n;
    double ss = 0.0;
    for (double x : v) ss += (x - m) * (x - m);
    return std::pair{m, std::sqrt(ss / (n - 1.0))};
  };
  double sin_sum = 0.0, cos_sum = 0.0;
  for (double p : phase) {
    sin_sum += std::sin(p);
    cos_sum += std::cos(p);
  }
  const double phase_mean = std::atan2(sin_sum, cos_sum);
  double phase_ss = 0.0;
  for (double p : phase) phase_ss += std::pow(wrap_phase(p - phase_mean), 2);

  FringeFit& fit = out.fit;
  fit = out.full_sample;
  const auto [c_mean, c_std] = mean_std(contrast);
  const auto [o_mean, o_std] = mean_std(offset);
  fit.contrast = c_mean;
  fit.offset = o_mean;
  fit.phase = wrap_phase(phase_mean);
  fit.contrast_err.bootstrap = c_std;
  fit.offset_err.bootstrap = o_std;
  fit.phase_err.bootstrap = std::sqrt(phase_ss / (n - 1.0));
  return out;
}

}  // namespace rydstab::analysis
