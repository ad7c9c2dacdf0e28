#pragma once

#include <string>
#include <vector>

#include "mpclo/errors.hpp"
#include "mpclo/linalg.hpp"

namespace mpclo {

enum class BlockKind { Orthant, Psd };

struct Block {
    BlockKind kind;
    int size;  // orthant dimension, or matrix order for Psd

    int vec_dim() const { return kind == BlockKind::Orthant ? size : size * (size + 1) / 2; }
    int barrier_degree() const { return size; }
};

// Product of nonnegative-orthant and PSD blocks. The cone is self-dual,
// so the same spec describes both K and K*.
struct ConeSpec {
    std::vector<Block> blocks;

    int total_dim() const;
    int barrier_degree() const;
    // Central element: all-ones on orthant blocks, svec(I) on PSD blocks.
    Vec central_element() const;
    bool operator==(const ConeSpec&) const = default;
};

inline ConeSpec orthant_cone(int dim) { return ConeSpec{{Block{BlockKind::Orthant, dim}}}; }
inline ConeSpec psd_cone(int order) { return ConeSpec{{Block{BlockKind::Psd, order}}}; }

// Scaled symmetric vectorization: diagonal kept, off-diagonal times sqrt(2),
// upper triangle in row-major order. With this scaling the flat dot product
// of two svecs equals the trace inner product of the matrices.
Vec svec(const Mat& x, double sym_tol_scale = 1e-9);
Mat smat(const Vec& v, int order);

enum class MembershipStatus { Interior, Boundary, Outside };

struct Membership {
    MembershipStatus status;
    double margin;  // min entry / min eigenvalue across blocks
};

Membership cone_membership(const Vec& z, const ConeSpec& spec, double tol = 1e-9);
Vec project_cone(const Vec& z, const ConeSpec& spec);

// Smallest eigenvalue/entry per block, used by membership and safeguards.
double cone_margin(const Vec& z, const ConeSpec& spec);

}  // namespace mpclo
