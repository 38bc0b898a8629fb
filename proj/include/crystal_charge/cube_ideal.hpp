#pragma once

#include <algorithm>
#include <array>
#include <bitset>
#include <cstdint>
#include <functional>
#include <numeric>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "crystal.hpp"
#include "errors.hpp"
#include "lattice.hpp"

namespace crystal_charge {

inline constexpr int kMaxCubeDim = 10;
/// Largest cube dimension enumerated exhaustively (M(6) = 7,828,354).
inline constexpr int kMaxExhaustiveDim = 6;

/// Downward-closed subset of the d-cube {0,1}^d. Corner delta maps to the
/// cell index sum_i delta_i 2^i; cell i sits at box sum_i delta_i e_{dirs[i]}.
class CubeIdeal {
public:
    using Cells = std::bitset<std::size_t{1} << kMaxCubeDim>;
    using Cell = std::uint32_t;

    /// Empty ideal on directions 0..d-1.
    explicit CubeIdeal(int d) : CubeIdeal(d, default_dirs(d)) {}

    CubeIdeal(int d, std::vector<int> dirs) : d_(d), dirs_(std::move(dirs)) {
        if (d < 0 || d > kMaxCubeDim) throw InvalidArgument("cube dimension " + std::to_string(d) + " outside 0..10");
        if (static_cast<int>(dirs_.size()) != d) throw InvalidArgument("need exactly d directions");
        DirMask seen = 0;
        for (int k : dirs_) {
            if (k < 0 || k >= kMaxDim || (seen >> k & 1U)) throw InvalidArgument("bad cube direction list");
            seen |= DirMask{1} << k;
        }
    }

    static CubeIdeal full(int d) { return full(d, default_dirs(d)); }
    static CubeIdeal full(int d, std::vector<int> dirs) {
        CubeIdeal c(d, std::move(dirs));
        for (Cell i = 0; i < c.cell_count(); ++i) c.cells_.set(i);
        return c;
    }

    /// Downward closure of the given cells.
    static CubeIdeal closure_of(int d, const std::vector<Cell>& generators) {
        CubeIdeal c(d);
        for (Cell g : generators) c.absorb_downset(g);
        return c;
    }

    int dim() const { return d_; }
    const std::vector<int>& dirs() const { return dirs_; }
    Cell cell_count() const { return Cell{1} << d_; }
    Cell top_cell() const { return cell_count() - 1; }
    std::size_t size() const { return cells_.count(); }
    bool contains(Cell i) const { return cells_.test(i); }
    const Cells& cells() const { return cells_; }

    bool can_add(Cell i) const {
        if (contains(i)) return false;
        for (int k = 0; k < d_; ++k)
            if ((i >> k & 1U) && !contains(i ^ (Cell{1} << k))) return false;
        return true;
    }

    bool can_remove(Cell i) const {
        if (!contains(i)) return false;
        for (int k = 0; k < d_; ++k)
            if (!(i >> k & 1U) && contains(i | (Cell{1} << k))) return false;
        return true;
    }

    void add(Cell i) {
        if (!can_add(i)) throw InvalidPartition("cell " + std::to_string(i) + " is not addable");
        cells_.set(i);
    }

    void remove(Cell i) {
        if (!can_remove(i)) throw InvalidPartition("cell " + std::to_string(i) + " is not removable");
        cells_.reset(i);
    }

    std::vector<Cell> addable_cells() const {
        std::vector<Cell> out;
        for (Cell i = 0; i < cell_count(); ++i)
            if (can_add(i)) out.push_back(i);
        return out;
    }

    std::vector<Cell> removable_cells() const {
        std::vector<Cell> out;
        for (Cell i = 0; i < cell_count(); ++i)
            if (can_remove(i)) out.push_back(i);
        return out;
    }

    bool is_downward_closed() const {
        for (Cell i = 0; i < cell_count(); ++i) {
            if (!contains(i)) continue;
            for (int k = 0; k < d_; ++k)
                if ((i >> k & 1U) && !contains(i ^ (Cell{1} << k))) return false;
        }
        return true;
    }

    /// Number of cells of the downset of i not yet in the ideal.
    std::size_t missing_below(Cell i) const {
        std::size_t missing = 0;
        for (Cell sub = i;; sub = (sub - 1) & i) {
            if (!contains(sub)) ++missing;
            if (sub == 0) break;
        }
        return missing;
    }

    void absorb_downset(Cell i) {
        for (Cell sub = i;; sub = (sub - 1) & i) {
            cells_.set(sub);
            if (sub == 0) break;
        }
    }

    /// Position of a cell in Z^n.
    Box cell_box(Cell i, int n) const {
        Box b(n);
        for (int k = 0; k < d_; ++k)
            if (i >> k & 1U) b[dirs_.at(static_cast<std::size_t>(k))] = 1;
        return b;
    }

    /// The far corner sum_i e_{dirs[i]}.
    Box top_box(int n) const { return cell_box(top_cell(), n); }

    Crystal embed(int n) const {
        for (int k : dirs_)
            if (k >= n) throw DimensionMismatch("cube direction outside ambient dimension");
        BoxSet boxes;
        boxes.reserve(size());
        for (Cell i = 0; i < cell_count(); ++i)
            if (contains(i)) boxes.insert(cell_box(i, n));
        return Crystal::from_boxes(n, std::move(boxes));
    }

    /// Occupancy as a hex string, most significant cell first.
    std::string hex() const {
        static constexpr char digits[] = "0123456789abcdef";
        std::string s;
        const Cell nibbles = std::max<Cell>(1, cell_count() / 4);
        for (Cell q = nibbles; q-- > 0;) {
            unsigned v = 0;
            for (Cell b = 0; b < 4; ++b)
                if (4 * q + b < cell_count() && contains(4 * q + b)) v |= 1U << b;
            s += digits[v];
        }
        return s;
    }

    friend bool operator==(const CubeIdeal& a, const CubeIdeal& b) {
        return a.d_ == b.d_ && a.dirs_ == b.dirs_ && a.cells_ == b.cells_;
    }

private:
    static std::vector<int> default_dirs(int d) {
        std::vector<int> v(static_cast<std::size_t>(std::max(d, 0)));
        std::iota(v.begin(), v.end(), 0);
        return v;
    }

    int d_;
    std::vector<int> dirs_;
    Cells cells_;
};

/// Calls fn(ideal) once for every ideal of the d-cube. Depth-first over the
/// cells in index order, which is a linear extension of the cube poset: a
/// cell may be taken only if every predecessor already was.
template <class Fn>
void for_each_ideal(int d, Fn&& fn) {
    if (d < 0 || d > kMaxExhaustiveDim)
        throw InvalidArgument("exhaustive enumeration supports d <= " + std::to_string(kMaxExhaustiveDim) +
                              "; use sample_ideal for larger cubes");
    CubeIdeal ideal(d);
    const CubeIdeal::Cell cells = ideal.cell_count();
    auto rec = [&](auto&& self, CubeIdeal::Cell i) -> void {
        if (i == cells) {
            fn(static_cast<const CubeIdeal&>(ideal));
            return;
        }
        self(self, i + 1);
        if (ideal.can_add(i)) {
            ideal.add(i);
            self(self, i + 1);
            ideal.remove(i);
        }
    };
    rec(rec, 0);
}

/// Every ideal of the d-cube, in depth-first order. Their number is the
/// Dedekind number M(d).
inline std::vector<CubeIdeal> enumerate_ideals(int d) {
    std::vector<CubeIdeal> out;
    for_each_ideal(d, [&](const CubeIdeal& c) { out.push_back(c); });
    return out;
}

inline std::uint64_t count_ideals(int d) {
    std::uint64_t n = 0;
    for_each_ideal(d, [&](const CubeIdeal&) { ++n; });
    return n;
}

enum class SampleStrategy { closure, walk, grow_to };

struct SampleSpec {
    SampleStrategy strategy = SampleStrategy::grow_to;
    /// Box count to hit. Required for grow_to; closure and walk draw one
    /// uniformly from 0..2^d when absent.
    std::optional<std::size_t> target;
};

namespace detail {

/// Addable and removable cells of an ideal, kept current under toggles.
/// Toggling a cell only changes the status of that cell and its d neighbours.
class Frontier {
public:
    explicit Frontier(CubeIdeal ideal)
        : ideal_(std::move(ideal)), slot_(ideal_.cell_count(), kNone), pos_(ideal_.cell_count(), 0) {
        for (CubeIdeal::Cell i = 0; i < ideal_.cell_count(); ++i) refresh(i);
    }

    const CubeIdeal& ideal() const { return ideal_; }
    CubeIdeal take() && { return std::move(ideal_); }
    const std::vector<CubeIdeal::Cell>& addable() const { return lists_[0]; }
    const std::vector<CubeIdeal::Cell>& removable() const { return lists_[1]; }

    void toggle(CubeIdeal::Cell i) {
        if (ideal_.contains(i)) ideal_.remove(i);
        else ideal_.add(i);
        refresh(i);
        for (int k = 0; k < ideal_.dim(); ++k) refresh(i ^ (CubeIdeal::Cell{1} << k));
    }

private:
    static constexpr std::uint8_t kNone = 2;

    void refresh(CubeIdeal::Cell i) {
        const std::uint8_t want = ideal_.can_add(i) ? 0 : ideal_.can_remove(i) ? 1 : kNone;
        if (slot_[i] == want) return;
        if (slot_[i] != kNone) erase(slot_[i], i);
        if (want != kNone) {
            pos_[i] = lists_[want].size();
            lists_[want].push_back(i);
        }
        slot_[i] = want;
    }

    void erase(std::uint8_t list, CubeIdeal::Cell i) {
        auto& v = lists_[list];
        const std::size_t p = pos_[i];
        v[p] = v.back();
        pos_[v[p]] = p;
        v.pop_back();
    }

    CubeIdeal ideal_;
    std::vector<std::uint8_t> slot_;
    std::array<std::vector<CubeIdeal::Cell>, 2> lists_;
    std::vector<std::size_t> pos_;
};

inline CubeIdeal grow_cube(CubeIdeal c, std::size_t target, std::mt19937_64& rng) {
    Frontier f(std::move(c));
    while (f.ideal().size() < target) {
        const auto& options = f.addable();
        std::uniform_int_distribution<std::size_t> pick(0, options.size() - 1);
        f.toggle(options[pick(rng)]);
    }
    return std::move(f).take();
}

} // namespace detail

/// A random ideal of the d-cube, deterministic in (spec, seed).
///  - grow_to: add uniformly random addable cells until `target` cells.
///  - closure: visit cells in random order, absorbing the downset of each
///    one that keeps the ideal within `target` cells, until nothing fits;
///    the result is the downward closure of the absorbed cells.
///  - walk: start from grow_to(target) and make 8 * 2^d toggles of uniformly
///    random addable/removable cells, rejecting toggles that leave the band
///    target +- 1.
inline CubeIdeal sample_ideal(int d, SampleSpec spec, std::uint64_t seed) {
    CubeIdeal empty(d);
    const std::size_t cells = empty.cell_count();
    std::mt19937_64 rng(seed);
    if (spec.target && *spec.target > cells)
        throw InvalidArgument("target " + std::to_string(*spec.target) + " exceeds 2^d = " + std::to_string(cells));
    if (!spec.target && spec.strategy == SampleStrategy::grow_to)
        throw InvalidArgument("grow_to needs a target box count");
    const std::size_t target = spec.target ? *spec.target : std::uniform_int_distribution<std::size_t>(0, cells)(rng);

    switch (spec.strategy) {
    case SampleStrategy::grow_to:
        return detail::grow_cube(std::move(empty), target, rng);
    case SampleStrategy::closure: {
        std::vector<CubeIdeal::Cell> order(cells);
        std::iota(order.begin(), order.end(), CubeIdeal::Cell{0});
        std::shuffle(order.begin(), order.end(), rng);
        CubeIdeal c = std::move(empty);
        for (bool changed = true; changed && c.size() < target;) {
            changed = false;
            for (auto i : order) {
                if (c.contains(i)) continue;
                if (c.size() + c.missing_below(i) <= target) {
                    c.absorb_downset(i);
                    changed = true;
                }
            }
        }
        return c;
    }
    case SampleStrategy::walk: {
        detail::Frontier f(detail::grow_cube(std::move(empty), target, rng));
        const std::size_t steps = 8 * cells;
        for (std::size_t s = 0; s < steps; ++s) {
            const std::size_t n_add = f.addable().size();
            const std::size_t n_rem = f.removable().size();
            const std::size_t k = std::uniform_int_distribution<std::size_t>(0, n_add + n_rem - 1)(rng);
            const std::size_t size = f.ideal().size();
            if (k < n_add) {
                if (size <= target) f.toggle(f.addable()[k]);
            } else if (size >= target) {
                f.toggle(f.removable()[k - n_add]);
            }
        }
        return std::move(f).take();
    }
    }
    throw InvalidArgument("unknown sampling strategy");
}

inline std::string to_string(SampleStrategy s) {
    switch (s) {
    case SampleStrategy::closure: return "closure";
    case SampleStrategy::walk: return "walk";
    case SampleStrategy::grow_to: return "grow_to";
    }
    return "?";
}

inline SampleStrategy parse_strategy(const std::string& s) {
    if (s == "closure") return SampleStrategy::closure;
    if (s == "walk") return SampleStrategy::walk;
    if (s == "grow_to" || s == "grow") return SampleStrategy::grow_to;
    throw InvalidArgument("unknown strategy '" + s + "' (closure, walk, grow_to)");
}

} // namespace crystal_charge
