#pragma once

#include <cassert>
#include <vector>

namespace rti {

// Uniform-per-side 1D mesh of (-m,0) u (0,l) with a mandatory node at 0.
struct Grid1D {
    double m = 1.0;
    double l = 1.0;
    int ne_minus = 0;  // elements on (-m,0)
    int ne_plus = 0;   // elements on (0,l)
    std::vector<double> x;  // nodes, strictly increasing, x[ne_minus] = 0 exactly

    static Grid1D uniform(double m, double l, int n_per_side) {
        Grid1D g;
        g.m = m;
        g.l = l;
        g.ne_minus = n_per_side;
        g.ne_plus = n_per_side;
        g.x.resize(static_cast<size_t>(2 * n_per_side) + 1);
        // constructed so that x[n_per_side] == 0 and the ends are exact
        for (int i = 0; i <= n_per_side; ++i)
            g.x[static_cast<size_t>(i)] = -m * static_cast<double>(n_per_side - i) /
                                          static_cast<double>(n_per_side);
        for (int j = 1; j <= n_per_side; ++j)
            g.x[static_cast<size_t>(n_per_side + j)] =
                l * static_cast<double>(j) / static_cast<double>(n_per_side);
        return g;
    }

    int n_nodes() const { return static_cast<int>(x.size()); }
    int n_elements() const { return ne_minus + ne_plus; }
    int interface_node() const { return ne_minus; }

    double node(int i) const { return x[static_cast<size_t>(i)]; }
    double h(int e) const { return x[static_cast<size_t>(e) + 1] - x[static_cast<size_t>(e)]; }
    double midpoint(int e) const {
        return 0.5 * (x[static_cast<size_t>(e)] + x[static_cast<size_t>(e) + 1]);
    }
    // side of an element: -1 below the interface, +1 above
    int side_of_element(int e) const { return e < ne_minus ? -1 : +1; }
};

// Dof numbering for piecewise-constant phi x continuous piecewise-linear psi.
// psi carries one dof per interior node (Dirichlet rows at -m and l are
// eliminated; the node at 0 is a single shared dof, so the jump of psi
// vanishes by construction). phi carries one dof per element and may jump
// at 0. Interleaved ordering keeps the pencil banded:
//   phi_e -> 2e,   psi_i -> 2i-1  (i = 1 .. n_nodes-2).
struct DofLayout {
    int n_elements = 0;
    int n_nodes = 0;
    int interface_node = 0;

    static DofLayout of(const Grid1D& grid) {
        return {grid.n_elements(), grid.n_nodes(), grid.interface_node()};
    }

    int total() const { return (n_nodes - 2) + n_elements; }
    int phi(int e) const { return 2 * e; }
    bool node_is_dof(int i) const { return i >= 1 && i <= n_nodes - 2; }
    int psi(int i) const {
        assert(node_is_dof(i));
        return 2 * i - 1;
    }
    int interface_psi() const { return psi(interface_node); }
    bool is_phi(int dof) const { return dof % 2 == 0; }
    int element_of(int dof) const { return dof / 2; }
    int node_of(int dof) const { return (dof + 1) / 2; }
};

}  // namespace rti
