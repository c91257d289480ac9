#pragma once

#include <cstdint>

namespace motx {

// Hard caps that turn would-be blowups into CapacityError.  A Limits value
// travels with every operation that enumerates residue tuples, characters
// or cyclotomic bases.  Defaults are sized for interactive use.
struct Limits {
    std::uint64_t max_enum = 1u << 22;       // residue tuples / integration cells per set
    std::uint64_t max_characters = 1u << 20; // size of a character family
    std::uint64_t max_group = 1u << 16;      // abelian group order in transforms
    std::uint64_t max_cyclo_order = 20000;   // root-of-unity order
    std::uint64_t max_q = 1u << 20;          // residue field size
    int max_precision = 64;                  // uniformizer digits carried
};

inline const Limits& default_limits() {
    static const Limits l{};
    return l;
}

} // namespace motx
