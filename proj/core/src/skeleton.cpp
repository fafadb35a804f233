#include "skelpre/skeleton.hpp"

#include <cmath>

namespace skelpre {

namespace {

double
face_length(const Mesh& m, Index f)
{
    const auto& p = m.vertices();
    const auto& face = m.faces()[f];
    return std::hypot(p[face.v[1]].x - p[face.v[0]].x, p[face.v[1]].y - p[face.v[0]].y);
}

} // namespace

SkeletonSpace::SkeletonSpace(MeshPtr mesh, int k) : mesh_(std::move(mesh)), k_(k)
{
    if (k < 0)
        throw UnsupportedDegreeError("skeleton degree must be non-negative");
    faces_ = skeleton_faces(*mesh_);
    offset_.assign(static_cast<std::size_t>(mesh_->num_faces()), -1);
    for (Index f : faces_) {
        offset_[f] = dofs_;
        dofs_ += k + 1;
    }
}

std::vector<TraceDof>
SkeletonSpace::element_dofs(Index t) const
{
    std::vector<TraceDof> out(static_cast<std::size_t>(3 * modes()));
    const auto& tri = mesh_->triangles()[t];
    for (int i = 0; i < 3; ++i) {
        const Index f = mesh_->triangle_faces()[t][i];
        const Index off = offset_[f];
        if (off < 0)
            continue;
        const bool reversed = mesh_->faces()[f].v[0] != tri[(i + 1) % 3];
        for (Index n = 0; n < modes(); ++n)
            out[i * modes() + n] = {off + n, reversed && n % 2 == 1 ? -1.0 : 1.0};
    }
    return out;
}

SkeletonSpace
build_space(MeshPtr m, int k)
{
    return SkeletonSpace(std::move(m), k);
}

DenseMatrix
element_triple_block(const Mesh& m, Index t, int k)
{
    const Index nm = k + 1;
    DenseMatrix q = DenseMatrix::Zero(3 * nm, 3 * nm);
    double w[3];
    double perimeter = 0.0;
    for (int i = 0; i < 3; ++i) {
        w[i] = face_length(m, m.triangle_faces()[t][i]);
        perimeter += w[i];
    }
    for (int i = 0; i < 3; ++i) {
        for (int j = 0; j < 3; ++j)
            q(i * nm, j * nm) = (i == j ? w[i] : 0.0) - (w[i] + w[j]) / 3.0 + perimeter / 9.0;
        for (Index n = 1; n < nm; ++n)
            q(i * nm + n, i * nm + n) = w[i];
    }
    return q / m.diameters()[t];
}

void
scatter_block(const std::vector<TraceDof>& dofs, const DenseMatrix& block, std::vector<Triplet>& out)
{
    for (std::size_t i = 0; i < dofs.size(); ++i) {
        if (dofs[i].index < 0)
            continue;
        for (std::size_t j = 0; j < dofs.size(); ++j) {
            if (dofs[j].index < 0)
                continue;
            out.push_back({dofs[i].index, dofs[j].index, dofs[i].sign * dofs[j].sign * block(i, j)});
        }
    }
}

GramMatrices
gram_matrices(const SkeletonSpace& s)
{
    const Mesh& m = s.mesh();
    Vector diag = Vector::Zero(s.dof_count());
    for (Index f : s.interior_faces()) {
        const auto& face = m.faces()[f];
        const double v = face_length(m, f) * (m.diameters()[face.tri[0]] + m.diameters()[face.tri[1]]);
        for (Index n = 0; n < s.modes(); ++n)
            diag[s.face_offset(f) + n] = v;
    }
    std::vector<Triplet> trips;
    for (Index t = 0; t < m.num_triangles(); ++t)
        scatter_block(s.element_dofs(t), element_triple_block(m, t, s.degree()), trips);
    return {diagonal_matrix(diag), csr_from_triplets(s.dof_count(), s.dof_count(), trips)};
}

double
norm_h(const SkeletonSpace& s, const Vector& v)
{
    const Mesh& m = s.mesh();
    double sum = 0.0;
    for (Index t = 0; t < m.num_triangles(); ++t) {
        double e = 0.0;
        for (int i = 0; i < 3; ++i) {
            const Index f = m.triangle_faces()[t][i];
            if (s.face_offset(f) < 0)
                continue;
            double c2 = 0.0;
            for (Index n = 0; n < s.modes(); ++n)
                c2 += v[s.face_offset(f) + n] * v[s.face_offset(f) + n];
            e += face_length(m, f) * c2;
        }
        sum += m.diameters()[t] * e;
    }
    return std::sqrt(sum);
}

double
triple_norm_h(const SkeletonSpace& s, const Vector& v)
{
    const Mesh& m = s.mesh();
    double sum = 0.0;
    for (Index t = 0; t < m.num_triangles(); ++t) {
        double c0[3] = {0.0, 0.0, 0.0};
        double higher = 0.0, len[3];
        for (int i = 0; i < 3; ++i) {
            const Index f = m.triangle_faces()[t][i];
            len[i] = face_length(m, f);
            if (s.face_offset(f) < 0)
                continue;
            c0[i] = v[s.face_offset(f)];
            for (Index n = 1; n < s.modes(); ++n)
                higher += len[i] * v[s.face_offset(f) + n] * v[s.face_offset(f) + n];
        }
        const double mean = (c0[0] + c0[1] + c0[2]) / 3.0;
        double e = higher;
        for (int i = 0; i < 3; ++i)
            e += len[i] * (c0[i] - mean) * (c0[i] - mean);
        sum += e / m.diameters()[t];
    }
    return std::sqrt(sum);
}

} // namespace skelpre
