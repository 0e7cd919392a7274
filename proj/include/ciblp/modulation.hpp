#pragma once

#include <complex>
#include <string>
#include <vector>

#include "ciblp/errors.hpp"

namespace ciblp {

using cplx = std::complex<double>;

enum class ModKind { Psk, Qam };

// Unit-average-energy constellation descriptor.
//
// PSK points sit on the unit circle at angles pi/M + 2*pi*k/M, so the
// decision boundaries fall on multiples of 2*pi/M. Square QAM uses
// component levels {+-1, +-3, ...} * gain with gain chosen for unit
// average symbol energy (1/sqrt(10) for 16QAM, 1/sqrt(42) for 64QAM).
struct Modulation {
    ModKind kind;
    int order;

    static Modulation psk(int order);
    static Modulation qam(int order);
    static Modulation parse(const std::string& name);  // "qpsk", "8psk", "16qam", ...

    std::string name() const;
    int num_points() const { return order; }

    // side-per-dimension and component gain for square QAM
    int qam_side() const;
    double qam_gain() const;
    double qam_max_level() const;  // largest component magnitude, e.g. 3/sqrt(10)

    cplx point(int index) const;
    std::vector<cplx> points() const;

    // Hard decision. PSK slices by phase sector; QAM expects the caller to
    // have divided out any amplitude scaling first (nominal grid slicer).
    int detect(cplx y) const;
};

// One symbol split along its two decision-boundary directions: s = s_a + s_b.
// PSK: s_a parallel to the clockwise boundary (angle phi - pi/M), s_b to the
// counter-clockwise one. QAM: s_a = Re(s), s_b = j*Im(s).
struct SymbolDecomposition {
    cplx s_a;
    cplx s_b;

    cplx recompose() const { return s_a + s_b; }
    // Re(s_a)Im(s_b) - Im(s_a)Re(s_b); the 2x2 system determinant.
    double determinant() const {
        return s_a.real() * s_b.imag() - s_a.imag() * s_b.real();
    }
};

SymbolDecomposition decompose_psk(cplx s, int order);
SymbolDecomposition decompose_qam(cplx s);
SymbolDecomposition decompose(cplx s, const Modulation& mod);

// CI eligibility of the real/imaginary components of one QAM symbol
// (outermost level exploits CI, inner levels are boundary-locked).
struct CiFlags {
    bool real_eligible;
    bool imag_eligible;
};

CiFlags classify_qam(cplx s, int order);

// Scaling coefficients (alpha_a, alpha_b) solving r = alpha_a*s_a + alpha_b*s_b.
struct ScalingPair {
    double alpha_a;
    double alpha_b;
};

ScalingPair scaling_from_received(cplx r, const SymbolDecomposition& dec);

}  // namespace ciblp
