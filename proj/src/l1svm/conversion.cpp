#include "marginlab/core/errors.hpp"
#include "marginlab/l1svm/l1svm.hpp"
#include "marginlab/simd/kernels.hpp"

#include <cmath>
#include <string>

namespace marginlab {

NetParams sparse_to_net(const SparseLiftedFn& alpha, std::size_t width) {
    if (width == 0) throw std::invalid_argument("sparse_to_net: width must be positive");
    if (width < alpha.atoms.size())
        throw std::invalid_argument("sparse_to_net: width " + std::to_string(width) + " < " +
                                    std::to_string(alpha.atoms.size()) + " atoms");
    if (alpha.atoms.empty()) throw std::invalid_argument("sparse_to_net: input dimension unknown for empty alpha");
    return sparse_to_net(alpha, width, alpha.atoms.front().direction.size());
}

NetParams sparse_to_net(const SparseLiftedFn& alpha, std::size_t width, std::size_t input_dim) {
    if (width < alpha.atoms.size())
        throw std::invalid_argument("sparse_to_net: width " + std::to_string(width) + " < " +
                                    std::to_string(alpha.atoms.size()) + " atoms");
    NetParams p(input_dim, {width}, 1);
    for (std::size_t j = 0; j < alpha.atoms.size(); ++j) {
        const Atom& a = alpha.atoms[j];
        if (a.direction.size() != input_dim) throw DimensionError("atom dimension does not match network input");
        const double s = std::sqrt(std::abs(a.coefficient) / 2.0);
        p.at(1, 0, j) = a.coefficient < 0.0 ? -s : s;
        for (std::size_t c = 0; c < input_dim; ++c) p.at(0, j, c) = s * a.direction[c];
    }
    return p;
}

SparseLiftedFn net_to_sparse(const NetParams& params) {
    if (!params.is_two_layer()) throw std::invalid_argument("net_to_sparse: two-layer single-output net required");
    const auto& k = simd::kernels();
    const std::size_t d = params.input_dim();
    SparseLiftedFn out;
    for (std::size_t j = 0; j < params.shape(0).rows; ++j) {
        const auto u = params.hidden_unit_in(j);
        const double w = params.hidden_unit_out(j);
        const double norm = std::sqrt(k.sum_sq(u.data(), d));
        if (!(norm > 0.0) || w == 0.0) continue;
        Atom a{std::vector<double>(u.begin(), u.end()), 2.0 * w * norm};
        for (double& c : a.direction) c /= norm;
        out.atoms.push_back(std::move(a));
    }
    return out;
}

}  // namespace marginlab
