#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "tfblur/fft.h"

namespace tfblur {

// Sampled waveform. Samples are stored as complex values; real signals carry
// zero imaginary parts and is_complex == false.
struct Signal {
  std::vector<cplx> samples;
  int sample_rate = 16000;
  bool is_complex = false;

  std::size_t length() const { return samples.size(); }
  double Energy() const;
  double Norm() const;
  std::vector<double> Real() const;

  static Signal FromReal(std::span<const double> values, int sample_rate);
  static Signal FromComplex(std::vector<cplx> values, int sample_rate);
};

// Throws kInvalidArgument if any sample is NaN or infinite or the rate is not
// positive.
void CheckSignal(const Signal& signal);

// PCM16 or IEEE float32 RIFF/WAVE. Multichannel input keeps channel 0 and
// prints a warning on stderr.
Signal ReadWav(const std::filesystem::path& path);
Signal ParseWav(std::span<const std::uint8_t> bytes);

// Mono IEEE float32. Only the real part of the samples is written.
void WriteWav(const Signal& signal, const std::filesystem::path& path);
std::vector<std::uint8_t> EncodeWav(const Signal& signal);

// Appends floor(extra / 2) zeros in front and the rest at the back.
Signal PadToLength(const Signal& signal, std::size_t target);

enum class SignalKind { kSinusoid, kChirp, kWhiteNoise, kImpulse, kGaussianPulse };

SignalKind ParseSignalKind(const std::string& name);

struct GenParams {
  std::size_t length = 16000;
  int sample_rate = 16000;
  double frequency = 440.0;   // sinusoid, gaussian_pulse carrier
  double f_start = 100.0;     // chirp
  double f_end = 4000.0;      // chirp
  // Impulse location (default 0) or pulse center (default length / 2).
  std::optional<std::size_t> position;
  double width = 400.0;       // gaussian_pulse width in samples
};

Signal GenSignal(SignalKind kind, const GenParams& params, std::uint64_t seed);

// Standard normal samples (complex: independent real and imaginary parts,
// each of variance 1/2). Used by randomized checks.
Signal RandomSignal(std::size_t length, std::uint64_t seed, bool complex_valued,
                    int sample_rate = 16000);

}  // namespace tfblur
