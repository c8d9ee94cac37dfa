#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "tfblur/gabor.h"
#include "tfblur/kernels.h"
#include "tfblur/signal.h"

namespace tfblur {

enum class SynthesisChoice {
  kDual,      // analysis with the window, synthesis with its canonical dual
  kTight,     // analysis and synthesis both with the tight version
  kExplicit,  // analysis with the window, synthesis with synthesis_window
};

SynthesisChoice ParseSynthesisChoice(const std::string& name);

// Everything needed to apply V_gamma^* (kernel * V_phi psi).
struct BlurSpec {
  Window window;
  SynthesisChoice synthesis = SynthesisChoice::kDual;
  std::optional<Window> synthesis_window;
  Kernel kernel;
  Lattice lattice;
  bool renormalize_energy = false;
};

// The (analysis, synthesis) window pair a spec resolves to.
struct WindowPair {
  Window analysis;
  Window synthesis;
};
WindowPair ResolveWindows(const BlurSpec& spec);

// Time-frequency blurring: synthesize(convolve(stft(psi))). The time axis of
// the convolution follows the lattice mode. With renormalize_energy the
// output is rescaled to the input l2 norm (zero output stays zero).
Signal Blur(const Signal& signal, const BlurSpec& spec);

// Adjoint of Blur without renormalization: V_phi^* (reflect(kernel) * V_gamma psi).
Signal BlurAdjoint(const Signal& signal, const BlurSpec& spec);

Signal BlurTwoWindow(const Signal& signal, const Window& analysis,
                     const Window& synthesis, const Kernel& kernel,
                     const Lattice& lattice);

struct OperatorWindowTerm {
  double weight = 1.0;
  Window analysis;
  Window synthesis;
};

// Finite-rank operator window sum_n s_n (phi_n^1 (x) phi_n^2).
struct OperatorWindowSpec {
  std::vector<OperatorWindowTerm> terms;
};

Signal BlurMultiWindow(const Signal& signal, const OperatorWindowSpec& spec,
                       const Kernel& kernel, const Lattice& lattice);

// STFT multiplier: synthesize(mask . stft(psi), dual). Mask is frames x
// channels, row-major.
Signal Localize(const Signal& signal, std::span<const cplx> mask, const Window& window,
                const Lattice& lattice);

// Each bin z gets sum_w field_z(w) V[z - w], then dual synthesis.
Signal BlurPositionDependent(const Signal& signal, const KernelField& field,
                             const Window& window, const Lattice& lattice);

// True when M * sum_k |phi(r + k a)|^2 == 1 for every residue within tol.
bool IsTightWindow(const Window& window, const Lattice& lattice, double tol = 1e-12);

// <B psi, psi> evaluated in the signal domain. The window must be tight and
// the lattice circular; otherwise kUnsupported.
cplx WeakAction(const Signal& psi, const Window& window, const Kernel& kernel,
                const Lattice& lattice);

// Same quantity through the 2D DFT of the coefficient grid:
// (1 / NM) sum kernel_hat |DFT2(V psi)|^2.
cplx WeakActionFourier(const Signal& psi, const Window& window, const Kernel& kernel,
                       const Lattice& lattice);

struct NormEstimate {
  double value = 0.0;
  std::vector<double> history;  // estimate after each iteration
};

// Power iteration on B^* B from a seeded complex Gaussian start. Circular
// lattices only. Renormalization in the spec is ignored (it is not linear).
NormEstimate OperatorNormEstimate(const BlurSpec& spec, int iterations = 200,
                                  std::uint64_t seed = 0);

// ||B psi||^2 / ||psi||^2 for the spec's operator (renormalization ignored).
double EnergyRetention(const Signal& signal, const BlurSpec& spec);

// max over `trials` seeded complex Gaussian psi of ||B psi|| / ||psi|| with
// B = V_phi^* (kernel * V_phi .) for a tight phi.
double MaxGain(const Window& tight_window, const Kernel& kernel, const Lattice& lattice,
               int trials, std::uint64_t seed);

struct ZeroOperatorResult {
  Window window;           // tight; its DFT vanishes on the band E
  Kernel kernel;           // 2D DFT supported in E x all channels
  Kernel shifted_kernel;   // same envelope with DFT support moved off E
  double residual = 0.0;   // MaxGain(window, kernel) over 20 trials
};

// Builds a nonzero window and kernel whose blurring operator vanishes: the
// time-axis DFT of every coefficient grid is a multiple of conj(phi_hat),
// which is zero wherever the kernel's DFT lives. Needs a = 1, W = M = L,
// L even and >= 32, circular mode.
ZeroOperatorResult ZeroOperatorDemo(const Lattice& lattice, std::uint64_t seed = 0);

}  // namespace tfblur
