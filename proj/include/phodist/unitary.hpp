#pragma once
// Interferometer matrices: Fourier, Hadamard, tensor Fourier, Haar random, custom.

#include <cmath>
#include <complex>
#include <fstream>
#include <numbers>
#include <random>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <nlohmann/json.hpp>

namespace phodist {

using cplx = std::complex<double>;
using Matrix = Eigen::MatrixXcd;

inline constexpr double kUnitarityTol = 1e-12;
inline constexpr double kCustomUnitarityTol = 1e-9;

enum class SpecKind { Fourier, Hadamard, FourierTuple, Haar, Custom };

struct UnitarySpec {
    SpecKind kind = SpecKind::Fourier;
    std::vector<int> dims;  // Fourier: {n}; Hadamard: {r}; FourierTuple: {n_1..n_l}; Haar: {n}
    std::uint64_t seed = 0;
    std::string label;      // Custom only
    Matrix custom;          // Custom only

    static UnitarySpec fourier(int n) { return {SpecKind::Fourier, {n}, 0, {}, {}}; }
    static UnitarySpec hadamard(int r) { return {SpecKind::Hadamard, {r}, 0, {}, {}}; }
    static UnitarySpec fourier_tuple(std::vector<int> ns) { return {SpecKind::FourierTuple, std::move(ns), 0, {}, {}}; }
    static UnitarySpec haar(int n, std::uint64_t seed) { return {SpecKind::Haar, {n}, seed, {}, {}}; }
    static UnitarySpec custom_matrix(std::string label, Matrix m) {
        return {SpecKind::Custom, {static_cast<int>(m.rows())}, 0, std::move(label), std::move(m)};
    }

    int size() const {
        switch (kind) {
            case SpecKind::Fourier:
            case SpecKind::Haar: return dims.at(0);
            case SpecKind::Hadamard: return 1 << dims.at(0);
            case SpecKind::FourierTuple: {
                int p = 1;
                for (int d : dims) p *= d;
                return p;
            }
            case SpecKind::Custom: return static_cast<int>(custom.rows());
        }
        return 0;
    }

    // Factor orders of the abelian mode-symmetry group, empty when none is known.
    std::vector<int> group_factors() const {
        switch (kind) {
            case SpecKind::Fourier: return {dims.at(0)};
            case SpecKind::Hadamard: return std::vector<int>(dims.at(0), 2);
            case SpecKind::FourierTuple: return dims;
            default: return {};
        }
    }

    std::string to_string() const {
        std::ostringstream os;
        switch (kind) {
            case SpecKind::Fourier: os << "fourier:" << dims.at(0); break;
            case SpecKind::Hadamard: os << "hadamard:" << dims.at(0); break;
            case SpecKind::FourierTuple:
                os << "ftuple:";
                for (std::size_t i = 0; i < dims.size(); ++i) os << (i ? "," : "") << dims[i];
                break;
            case SpecKind::Haar: os << "haar:" << dims.at(0) << ":seed=" << seed; break;
            case SpecKind::Custom: os << "custom:" << label; break;
        }
        return os.str();
    }

    void validate() const {
        switch (kind) {
            case SpecKind::Fourier:
                if (dims.size() != 1 || dims[0] < 2) throw std::invalid_argument("fourier: need n >= 2");
                break;
            case SpecKind::Hadamard:
                if (dims.size() != 1 || dims[0] < 1 || dims[0] > 4) throw std::invalid_argument("hadamard: need 1 <= r <= 4");
                break;
            case SpecKind::FourierTuple: {
                if (dims.empty()) throw std::invalid_argument("ftuple: empty factor list");
                for (int d : dims)
                    if (d < 2) throw std::invalid_argument("ftuple: every factor must be >= 2");
                if (size() <= 2) throw std::invalid_argument("ftuple: product must exceed 2");
                break;
            }
            case SpecKind::Haar:
                if (dims.size() != 1 || dims[0] < 2) throw std::invalid_argument("haar: need n >= 2");
                break;
            case SpecKind::Custom:
                if (custom.rows() != custom.cols() || custom.rows() < 1)
                    throw std::invalid_argument("custom: matrix must be square");
                break;
        }
        if (size() > 16) throw std::invalid_argument("spec: at most 16 modes supported");
    }
};

// Protocol specs additionally need n >= 3 (two modes have no ideal patterns).
inline void validate_protocol(const UnitarySpec& s) {
    s.validate();
    if (s.kind == SpecKind::Fourier && s.dims[0] < 3) throw std::invalid_argument("fourier: protocol needs n >= 3");
    if (s.kind == SpecKind::Hadamard && s.dims[0] < 2) throw std::invalid_argument("hadamard: protocol needs r >= 2");
}

inline double unitarity_residual(const Matrix& U) {
    Matrix E = U * U.adjoint() - Matrix::Identity(U.rows(), U.cols());
    return E.cwiseAbs().maxCoeff();
}

struct UnitaryMatrix {
    Matrix U;
    UnitarySpec spec;
    int size() const { return static_cast<int>(U.rows()); }
    cplx operator()(int i, int j) const { return U(i, j); }
};

// Mixed-radix digits of a mode label, least significant factor first.
inline std::vector<int> mixed_digits(int g, const std::vector<int>& radices) {
    std::vector<int> d(radices.size());
    for (std::size_t i = 0; i < radices.size(); ++i) {
        d[i] = g % radices[i];
        g /= radices[i];
    }
    return d;
}

inline int from_mixed_digits(const std::vector<int>& d, const std::vector<int>& radices) {
    int g = 0, w = 1;
    for (std::size_t i = 0; i < radices.size(); ++i) {
        g += w * d[i];
        w *= radices[i];
    }
    return g;
}

namespace detail {
inline cplx root_of_unity(long long k, int n) {
    k %= n;
    if (k < 0) k += n;
    const double a = 2.0 * std::numbers::pi * static_cast<double>(k) / n;
    return {std::cos(a), std::sin(a)};
}

inline Matrix tensor_fourier(const std::vector<int>& ns) {
    int n = 1;
    for (int d : ns) n *= d;
    Matrix U(n, n);
    double norm = 1.0 / std::sqrt(static_cast<double>(n));
    for (int g = 0; g < n; ++g) {
        auto a = mixed_digits(g, ns);
        for (int h = 0; h < n; ++h) {
            auto b = mixed_digits(h, ns);
            cplx v = 1.0;
            for (std::size_t i = 0; i < ns.size(); ++i) v *= root_of_unity(static_cast<long long>(a[i]) * b[i], ns[i]);
            U(g, h) = v * norm;
        }
    }
    return U;
}
}  // namespace detail

inline Matrix sample_haar_matrix(int n, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> gauss(0.0, std::sqrt(0.5));
    Matrix Z(n, n);
    for (int j = 0; j < n; ++j)
        for (int i = 0; i < n; ++i) {
            double re = gauss(rng);
            double im = gauss(rng);
            Z(i, j) = cplx(re, im);
        }
    Eigen::HouseholderQR<Matrix> qr(Z);
    Matrix Q = qr.householderQ();
    Matrix R = qr.matrixQR().triangularView<Eigen::Upper>();
    for (int j = 0; j < n; ++j) {
        cplx r = R(j, j);
        double a = std::abs(r);
        Q.col(j) *= (a > 0 ? r / a : cplx(1.0));
    }
    return Q;
}

inline UnitaryMatrix build(const UnitarySpec& spec) {
    spec.validate();
    UnitaryMatrix out;
    out.spec = spec;
    switch (spec.kind) {
        case SpecKind::Fourier: out.U = detail::tensor_fourier({spec.dims[0]}); break;
        case SpecKind::Hadamard: out.U = detail::tensor_fourier(std::vector<int>(spec.dims[0], 2)); break;
        case SpecKind::FourierTuple: out.U = detail::tensor_fourier(spec.dims); break;
        case SpecKind::Haar: out.U = sample_haar_matrix(spec.dims[0], spec.seed); break;
        case SpecKind::Custom:
            out.U = spec.custom;
            if (unitarity_residual(out.U) >= kCustomUnitarityTol)
                throw std::invalid_argument("custom: matrix is not unitary");
            return out;
    }
    if (unitarity_residual(out.U) >= kUnitarityTol) throw std::logic_error("build: unitarity check failed");
    return out;
}

inline UnitaryMatrix sample_haar(int n, std::uint64_t seed) { return build(UnitarySpec::haar(n, seed)); }

// Custom matrix from JSON: either a flat row-major list of n*n [re, im] pairs
// or a list of n rows of [re, im] pairs.
inline Matrix matrix_from_json(const nlohmann::json& j) {
    std::vector<cplx> vals;
    auto take = [&](const nlohmann::json& e) {
        if (!e.is_array() || e.size() != 2) throw std::invalid_argument("custom: entries must be [re, im]");
        vals.emplace_back(e[0].get<double>(), e[1].get<double>());
    };
    if (!j.is_array() || j.empty()) throw std::invalid_argument("custom: expected a JSON array");
    bool nested = j[0].is_array() && !j[0].empty() && j[0][0].is_array();
    if (nested) {
        for (const auto& row : j)
            for (const auto& e : row) take(e);
    } else {
        for (const auto& e : j) take(e);
    }
    auto n = static_cast<int>(std::lround(std::sqrt(static_cast<double>(vals.size()))));
    if (static_cast<std::size_t>(n) * n != vals.size()) throw std::invalid_argument("custom: entry count is not a square");
    Matrix M(n, n);
    for (int i = 0; i < n; ++i)
        for (int k = 0; k < n; ++k) M(i, k) = vals[static_cast<std::size_t>(i) * n + k];
    if (unitarity_residual(M) >= kCustomUnitarityTol) throw std::invalid_argument("custom: matrix is not unitary");
    return M;
}

inline Matrix load_custom_matrix(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::invalid_argument("custom: cannot open " + path);
    return matrix_from_json(nlohmann::json::parse(in));
}

// "fourier:8", "hadamard:3", "ftuple:4,2", "haar:6:seed=7", "custom:path.json"
inline UnitarySpec parse_spec(const std::string& text) {
    auto colon = text.find(':');
    if (colon == std::string::npos) throw std::invalid_argument("spec: expected kind:params, got '" + text + "'");
    std::string kind = text.substr(0, colon), rest = text.substr(colon + 1);
    auto to_int = [&](const std::string& s) {
        std::size_t pos = 0;
        int v = 0;
        try {
            v = std::stoi(s, &pos);
        } catch (const std::exception&) {
            throw std::invalid_argument("spec: bad integer '" + s + "'");
        }
        if (pos != s.size()) throw std::invalid_argument("spec: bad integer '" + s + "'");
        return v;
    };
    UnitarySpec spec;
    if (kind == "fourier") {
        spec = UnitarySpec::fourier(to_int(rest));
    } else if (kind == "hadamard") {
        spec = UnitarySpec::hadamard(to_int(rest));
    } else if (kind == "ftuple") {
        std::vector<int> ns;
        std::stringstream ss(rest);
        for (std::string tok; std::getline(ss, tok, ',');) ns.push_back(to_int(tok));
        spec = UnitarySpec::fourier_tuple(ns);
    } else if (kind == "haar") {
        auto c2 = rest.find(':');
        std::uint64_t seed = 0;
        if (c2 != std::string::npos) {
            std::string opt = rest.substr(c2 + 1);
            if (opt.rfind("seed=", 0) != 0) throw std::invalid_argument("spec: haar option must be seed=N");
            seed = std::stoull(opt.substr(5));
            rest = rest.substr(0, c2);
        }
        spec = UnitarySpec::haar(to_int(rest), seed);
    } else if (kind == "custom") {
        spec = UnitarySpec::custom_matrix(rest, load_custom_matrix(rest));
    } else {
        throw std::invalid_argument("spec: unknown kind '" + kind + "'");
    }
    spec.validate();
    return spec;
}

// UP = DU with (UP)(i, j) = U(i, perm[j]) and D = diag(phases).
struct SymmetryGenerator {
    std::vector<int> perm;
    std::vector<cplx> phases;
    int order = 1;
};

inline double symmetry_residual(const Matrix& U, const SymmetryGenerator& g) {
    double worst = 0;
    for (int i = 0; i < U.rows(); ++i)
        for (int j = 0; j < U.cols(); ++j)
            worst = std::max(worst, std::abs(U(i, g.perm[j]) - g.phases[i] * U(i, j)));
    return worst;
}

// One cyclic generator per tensor factor: shift that factor's digit by one.
inline std::vector<SymmetryGenerator> symmetry_generators(const UnitarySpec& spec) {
    const auto factors = spec.group_factors();
    std::vector<SymmetryGenerator> out;
    const int n = spec.size();
    for (std::size_t f = 0; f < factors.size(); ++f) {
        SymmetryGenerator g;
        g.order = factors[f];
        g.perm.resize(n);
        g.phases.resize(n);
        for (int x = 0; x < n; ++x) {
            auto d = mixed_digits(x, factors);
            g.phases[x] = detail::root_of_unity(d[f], factors[f]);
            d[f] = (d[f] + 1) % factors[f];
            g.perm[x] = from_mixed_digits(d, factors);
        }
        out.push_back(std::move(g));
    }
    return out;
}

}  // namespace phodist
