#pragma once

#include <bit>
#include <cstdint>
#include <string>
#include <vector>

namespace g2sf {

// A strictly increasing multi-index (i1 < i2 < ... < ik) over axes {0..n-1},
// packed as a bitmask. Bit i set means axis i participates. The canonical
// component ordering everywhere in this project is lexicographic in the index
// tuple, e.g. for k=2, n=4: (01, 02, 03, 12, 13, 23).
using Mask = std::uint32_t;

inline int mask_degree(Mask m) { return std::popcount(m); }

inline bool mask_contains(Mask m, int axis) { return (m >> axis) & 1u; }

// Enumerate all degree-k subsets of {0..n-1} in lexicographic tuple order.
inline std::vector<Mask> increasing_subsets(int n, int k) {
    std::vector<Mask> out;
    if (k < 0 || k > n) return out;
    std::vector<int> idx(static_cast<std::size_t>(k));
    for (int i = 0; i < k; ++i) idx[static_cast<std::size_t>(i)] = i;
    while (true) {
        Mask m = 0;
        for (int i : idx) m |= Mask(1) << i;
        out.push_back(m);
        if (k == 0) break;
        int pos = k - 1;
        while (pos >= 0 && idx[static_cast<std::size_t>(pos)] == n - k + pos) --pos;
        if (pos < 0) break;
        ++idx[static_cast<std::size_t>(pos)];
        for (int i = pos + 1; i < k; ++i)
            idx[static_cast<std::size_t>(i)] = idx[static_cast<std::size_t>(i - 1)] + 1;
    }
    return out;
}

inline std::vector<int> mask_axes(Mask m) {
    std::vector<int> axes;
    for (int i = 0; i < 32; ++i)
        if (mask_contains(m, i)) axes.push_back(i);
    return axes;
}

// Sign of the shuffle permutation sorting the concatenation (A..., B...) of two
// disjoint increasing tuples; 0 if the masks overlap.
inline int wedge_sign(Mask a, Mask b) {
    if (a & b) return 0;
    int inversions = 0;
    for (int i = 0; i < 32; ++i) {
        if (!mask_contains(b, i)) continue;
        // elements of `a` strictly greater than i each contribute one inversion
        Mask above = a & ~((Mask(1) << (i + 1)) - 1);
        inversions += std::popcount(above);
    }
    return (inversions & 1) ? -1 : 1;
}

// Sign (-1)^(position of `axis` within the increasing tuple of m).
// Used by the interior product: iota_v e^{i1..ik} = sum_a (-1)^(a) v^{ia} e^{I \ ia}
// with a counted from 0.
inline int removal_sign(Mask m, int axis) {
    Mask below = m & ((Mask(1) << axis) - 1);
    return (std::popcount(below) & 1) ? -1 : 1;
}

inline std::string mask_to_string(Mask m, int one_based = 1) {
    std::string s;
    for (int i = 0; i < 32; ++i)
        if (mask_contains(m, i)) s += std::to_string(i + one_based);
    return s;
}

}  // namespace g2sf
