#include "ciblp/modulation.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace ciblp {

namespace {
constexpr double kPi = std::numbers::pi;
constexpr double kDegenerateTol = 1e-12;
}  // namespace

Modulation Modulation::psk(int order) {
    if (order != 4 && order != 8 && order != 16)
        throw InvalidModulation("PSK order must be one of {4, 8, 16}, got " +
                                std::to_string(order));
    return {ModKind::Psk, order};
}

Modulation Modulation::qam(int order) {
    if (order != 16 && order != 64)
        throw InvalidModulation("QAM order must be one of {16, 64}, got " +
                                std::to_string(order));
    return {ModKind::Qam, order};
}

Modulation Modulation::parse(const std::string& name) {
    std::string s;
    for (char c : name) s.push_back(static_cast<char>(std::tolower(c)));
    if (s == "qpsk" || s == "4psk") return psk(4);
    if (s == "8psk") return psk(8);
    if (s == "16psk") return psk(16);
    if (s == "16qam") return qam(16);
    if (s == "64qam") return qam(64);
    throw InvalidModulation("unknown modulation '" + name + "'");
}

std::string Modulation::name() const {
    if (kind == ModKind::Psk)
        return order == 4 ? "qpsk" : std::to_string(order) + "psk";
    return std::to_string(order) + "qam";
}

int Modulation::qam_side() const {
    if (kind != ModKind::Qam) throw InvalidModulation("qam_side on PSK");
    return order == 16 ? 4 : 8;
}

double Modulation::qam_gain() const {
    // average energy of {+-1,..,+-(L-1)} per dimension is (L^2-1)/3; two dims
    const int side = qam_side();
    return 1.0 / std::sqrt(2.0 * (side * side - 1) / 3.0);
}

double Modulation::qam_max_level() const { return (qam_side() - 1) * qam_gain(); }

cplx Modulation::point(int index) const {
    if (index < 0 || index >= order)
        throw InvalidModulation("constellation index out of range");
    if (kind == ModKind::Psk) {
        const double ang = kPi / order + 2.0 * kPi * index / order;
        return {std::cos(ang), std::sin(ang)};
    }
    const int side = qam_side();
    const double g = qam_gain();
    const int i = index % side;
    const int q = index / side;
    return {(2 * i - (side - 1)) * g, (2 * q - (side - 1)) * g};
}

std::vector<cplx> Modulation::points() const {
    std::vector<cplx> pts(order);
    for (int i = 0; i < order; ++i) pts[i] = point(i);
    return pts;
}

int Modulation::detect(cplx y) const {
    if (kind == ModKind::Psk) {
        double ang = std::arg(y);
        if (ang < 0.0) ang += 2.0 * kPi;
        int idx = static_cast<int>(std::floor(ang * order / (2.0 * kPi)));
        return std::clamp(idx, 0, order - 1);
    }
    const int side = qam_side();
    const double g = qam_gain();
    auto slice = [&](double v) {
        int li = static_cast<int>(std::lround((v / g + (side - 1)) / 2.0));
        return std::clamp(li, 0, side - 1);
    };
    return slice(y.imag()) * side + slice(y.real());
}

SymbolDecomposition decompose_psk(cplx s, int order) {
    if (order < 4)
        throw InvalidModulation(
            "PSK decomposition needs order >= 4 (boundary directions "
            "collinear below that)");
    const double phi = std::arg(s);
    const cplx u = std::polar(1.0, phi - kPi / order);
    const cplx v = std::polar(1.0, phi + kPi / order);
    // solve a*u + b*v = s as a real 2x2 system
    const double det = u.real() * v.imag() - u.imag() * v.real();
    if (std::abs(det) < kDegenerateTol)
        throw DegenerateDecomposition("PSK boundary directions collinear");
    const double a = (s.real() * v.imag() - s.imag() * v.real()) / det;
    const double b = (u.real() * s.imag() - u.imag() * s.real()) / det;
    return {a * u, b * v};
}

SymbolDecomposition decompose_qam(cplx s) {
    if (std::abs(s.real()) < kDegenerateTol || std::abs(s.imag()) < kDegenerateTol)
        throw DegenerateDecomposition(
            "QAM symbol on a coordinate axis has no two-direction split");
    return {cplx(s.real(), 0.0), cplx(0.0, s.imag())};
}

SymbolDecomposition decompose(cplx s, const Modulation& mod) {
    return mod.kind == ModKind::Psk ? decompose_psk(s, mod.order) : decompose_qam(s);
}

CiFlags classify_qam(cplx s, int order) {
    const Modulation mod = Modulation::qam(order);
    const double top = mod.qam_max_level();
    const double tol = 1e-9 * top;
    return {std::abs(s.real()) >= top - tol, std::abs(s.imag()) >= top - tol};
}

ScalingPair scaling_from_received(cplx r, const SymbolDecomposition& dec) {
    const double det = dec.determinant();
    if (std::abs(det) < kDegenerateTol)
        throw DegenerateDecomposition("decomposition determinant below 1e-12");
    const double aa = (r.real() * dec.s_b.imag() - r.imag() * dec.s_b.real()) / det;
    const double ab = (dec.s_a.real() * r.imag() - dec.s_a.imag() * r.real()) / det;
    return {aa, ab};
}

}  // namespace ciblp
