#include "tfblur/operators.h"

#include <cmath>
#include <numbers>

#include "tfblur/error.h"

namespace tfblur {
namespace {

Signal MarkComplexity(Signal out, bool input_complex) {
  if (input_complex) {
    out.is_complex = true;
    return out;
  }
  double imag = 0.0, total = 0.0;
  for (const auto& s : out.samples) {
    imag += s.imag() * s.imag();
    total += std::norm(s);
  }
  out.is_complex = imag > 1e-24 * (total > 0 ? total : 1.0);
  return out;
}

Signal ApplyBlur(const Signal& signal, const Window& analysis, const Window& synthesis,
                 const Kernel& kernel, const Lattice& lattice) {
  TfMatrix tf = Stft(signal, analysis, lattice);
  TfMatrix blurred = kernel.IsDelta() ? std::move(tf) : ConvolveTf(tf, kernel, lattice.mode);
  return MarkComplexity(Synthesize(blurred, synthesis, lattice), signal.is_complex);
}

Signal ScaledTo(Signal s, double norm) {
  double current = s.Norm();
  if (current == 0.0) return s;
  for (auto& v : s.samples) v *= norm / current;
  return s;
}

}  // namespace

SynthesisChoice ParseSynthesisChoice(const std::string& name) {
  if (name == "dual") return SynthesisChoice::kDual;
  if (name == "tight") return SynthesisChoice::kTight;
  if (name == "explicit") return SynthesisChoice::kExplicit;
  Fail(ErrorCode::kInvalidArgument, "unknown synthesis choice '" + name + "'");
}

WindowPair ResolveWindows(const BlurSpec& spec) {
  switch (spec.synthesis) {
    case SynthesisChoice::kDual:
      return {spec.window, DualWindow(spec.window, spec.lattice)};
    case SynthesisChoice::kTight: {
      Window tight = TightWindow(spec.window, spec.lattice);
      return {tight, tight};
    }
    case SynthesisChoice::kExplicit:
      Require(spec.synthesis_window.has_value(),
              "explicit synthesis requested without a synthesis window");
      return {spec.window, *spec.synthesis_window};
  }
  Fail(ErrorCode::kInvalidArgument, "bad synthesis choice");
}

Signal Blur(const Signal& signal, const BlurSpec& spec) {
  WindowPair w = ResolveWindows(spec);
  Signal out = ApplyBlur(signal, w.analysis, w.synthesis, spec.kernel, spec.lattice);
  if (spec.renormalize_energy) out = ScaledTo(std::move(out), signal.Norm());
  return out;
}

Signal BlurAdjoint(const Signal& signal, const BlurSpec& spec) {
  WindowPair w = ResolveWindows(spec);
  return ApplyBlur(signal, w.synthesis, w.analysis, ReflectKernel(spec.kernel),
                   spec.lattice);
}

Signal BlurTwoWindow(const Signal& signal, const Window& analysis, const Window& synthesis,
                     const Kernel& kernel, const Lattice& lattice) {
  return ApplyBlur(signal, analysis, synthesis, kernel, lattice);
}

Signal BlurMultiWindow(const Signal& signal, const OperatorWindowSpec& spec,
                       const Kernel& kernel, const Lattice& lattice) {
  Require(!spec.terms.empty(), "operator window needs at least one term");
  Signal out;
  out.sample_rate = signal.sample_rate;
  out.samples.assign(signal.length(), cplx{});
  for (const auto& term : spec.terms) {
    Require(std::isfinite(term.weight), "operator window weights must be finite");
    Signal part = ApplyBlur(signal, term.analysis, term.synthesis, kernel, lattice);
    for (std::size_t t = 0; t < out.length(); ++t) out.samples[t] += term.weight * part.samples[t];
  }
  return MarkComplexity(std::move(out), signal.is_complex);
}

Signal Localize(const Signal& signal, std::span<const cplx> mask, const Window& window,
                const Lattice& lattice) {
  Require(mask.size() == lattice.num_frames() * lattice.channels,
          "mask shape does not match the coefficient grid");
  TfMatrix tf = Stft(signal, window, lattice);
  for (std::size_t i = 0; i < tf.coeffs.size(); ++i) tf.coeffs[i] *= mask[i];
  return MarkComplexity(Synthesize(tf, DualWindow(window, lattice), lattice),
                        signal.is_complex);
}

Signal BlurPositionDependent(const Signal& signal, const KernelField& field,
                             const Window& window, const Lattice& lattice) {
  Require(field.lattice() == lattice, "kernel field lattice does not match");
  TfMatrix tf = ApplyField(Stft(signal, window, lattice), field, lattice.mode);
  return MarkComplexity(Synthesize(tf, DualWindow(window, lattice), lattice),
                        signal.is_complex);
}

bool IsTightWindow(const Window& window, const Lattice& lattice, double tol) {
  const auto diag = FrameDiagonal(window, lattice);
  const double M = static_cast<double>(lattice.channels);
  for (double d : diag)
    if (std::abs(M * d - 1.0) > tol) return false;
  return true;
}

namespace {

void RequireWeakActionSetting(const Window& window, const Lattice& lattice) {
  if (lattice.mode != BoundaryMode::kCircular)
    Fail(ErrorCode::kUnsupported, "weak action needs a circular lattice");
  if (!IsTightWindow(window, lattice, 1e-10))
    Fail(ErrorCode::kUnsupported, "weak action needs a tight window");
}

}  // namespace

cplx WeakAction(const Signal& psi, const Window& window, const Kernel& kernel,
                const Lattice& lattice) {
  RequireWeakActionSetting(window, lattice);
  Signal b = ApplyBlur(psi, window, window, kernel, lattice);
  return InnerProduct(b.samples, psi.samples);
}

cplx WeakActionFourier(const Signal& psi, const Window& window, const Kernel& kernel,
                       const Lattice& lattice) {
  RequireWeakActionSetting(window, lattice);
  TfMatrix tf = Stft(psi, window, lattice);
  const std::size_t N = tf.frames(), M = tf.channels();
  fft::Forward2D(tf.coeffs, N, M);
  const auto kernel_hat = KernelDft(kernel, N, M);
  cplx acc{};
  for (std::size_t i = 0; i < tf.coeffs.size(); ++i)
    acc += kernel_hat[i] * std::norm(tf.coeffs[i]);
  return acc / static_cast<double>(N * M);
}

NormEstimate OperatorNormEstimate(const BlurSpec& spec, int iterations, std::uint64_t seed) {
  Require(iterations >= 1, "power iteration needs at least one step");
  if (spec.lattice.mode != BoundaryMode::kCircular)
    Fail(ErrorCode::kUnsupported, "operator norm estimate needs a circular lattice");
  BlurSpec linear = spec;
  linear.renormalize_energy = false;

  auto unit_start = [&](std::uint64_t s) {
    Signal x = RandomSignal(spec.lattice.signal_len, s, true);
    double n = x.Norm();
    for (auto& v : x.samples) v /= n;
    return x;
  };
  Signal x = unit_start(seed);
  NormEstimate est;
  for (int it = 0; it < iterations; ++it) {
    Signal z = BlurAdjoint(Blur(x, linear), linear);
    double growth = z.Norm();
    if (growth == 0.0) {
      // The start landed in the null space; try another draw.
      x = unit_start(seed + static_cast<std::uint64_t>(it) + 1);
      est.history.push_back(0.0);
      continue;
    }
    est.history.push_back(std::sqrt(growth));
    for (auto& v : z.samples) v /= growth;
    x = std::move(z);
  }
  est.value = est.history.back();
  return est;
}

double EnergyRetention(const Signal& signal, const BlurSpec& spec) {
  BlurSpec linear = spec;
  linear.renormalize_energy = false;
  double in = signal.Energy();
  Require(in > 0, "energy retention of a zero signal");
  return Blur(signal, linear).Energy() / in;
}

double MaxGain(const Window& tight_window, const Kernel& kernel, const Lattice& lattice,
               int trials, std::uint64_t seed) {
  double worst = 0.0;
  for (int k = 0; k < trials; ++k) {
    Signal psi = RandomSignal(lattice.signal_len, seed + static_cast<std::uint64_t>(k), true);
    Signal out = ApplyBlur(psi, tight_window, tight_window, kernel, lattice);
    worst = std::max(worst, out.Norm() / psi.Norm());
  }
  return worst;
}

ZeroOperatorResult ZeroOperatorDemo(const Lattice& lattice, std::uint64_t seed) {
  const std::size_t L = lattice.signal_len;
  Require(lattice.mode == BoundaryMode::kCircular, "zero-operator demo needs circular mode");
  Require(lattice.hop == 1 && lattice.channels == L && lattice.window_len == L,
          "zero-operator demo needs the full lattice a = 1, W = M = L");
  Require(L >= 32 && L % 2 == 0, "lattice too small to separate the supports");
  lattice.Validate();

  // Band E = {k : |k - L/2| <= p} of time-axis DFT indices.
  const long half = static_cast<long>(L / 2);
  const long p = std::max<long>(2, static_cast<long>(L / 64));

  // Window: Gaussian spectrum forced to zero on E, real and even.
  std::vector<cplx> spectrum(L);
  const double width = static_cast<double>(L) / 8.0;
  for (long k = 0; k < static_cast<long>(L); ++k) {
    long centred = k <= half ? k : k - static_cast<long>(L);
    if (std::abs(centred) >= half - p) continue;
    double x = static_cast<double>(centred) / width;
    spectrum[static_cast<std::size_t>(k)] = std::exp(-std::numbers::pi * x * x);
  }
  fft::Inverse(spectrum);
  std::vector<cplx> values(L);
  for (std::size_t t = 0; t < L; ++t) values[t] = spectrum[t].real() / static_cast<double>(L);
  Window tight = TightWindow(Window::Custom(std::move(values)), lattice);

  // Kernel: cos^{2p}(pi n / L) has time-axis DFT on |k| <= p; the (-1)^n
  // factor moves it to |k - L/2| <= p. It vanishes at n = L/2, so the taps
  // fit an odd extent of L - 1.
  const std::size_t taps = L - 1;
  std::vector<double> on_band(taps), off_band(taps);
  for (long n = -(half - 1); n <= half - 1; ++n) {
    double envelope = std::pow(std::cos(std::numbers::pi * static_cast<double>(n) /
                                        static_cast<double>(L)),
                               2.0 * static_cast<double>(p));
    std::size_t idx = static_cast<std::size_t>(n + half - 1);
    off_band[idx] = envelope;
    on_band[idx] = (n % 2 == 0 ? 1.0 : -1.0) * envelope;
  }

  ZeroOperatorResult r{tight, Kernel(taps, 1, std::move(on_band)),
                       Kernel(taps, 1, std::move(off_band)), 0.0};
  r.residual = MaxGain(r.window, r.kernel, lattice, 20, seed);
  return r;
}

}  // namespace tfblur
