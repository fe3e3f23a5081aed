#pragma once

#include <complex>
#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "cpcl/matrix.hpp"

namespace cpcl {

using cdouble = std::complex<double>;

/// OFDM numerology of one processing frame. Rows of every grid-shaped matrix
/// are carriers, columns are OFDM symbols.
struct Numerology {
    double subcarrier_spacing_hz = 15.0e3;
    std::size_t num_carriers = 72;
    std::size_t num_symbols = 28;
    double cp_fraction = 1.0 / 14.0;
    double carrier_frequency_hz = 2.0e9;

    /// Throws Error(InvalidArgument) unless spacing > 0, M >= 12,
    /// cp_fraction in [0, 0.5], at least one symbol and a positive carrier.
    void validate() const;

    double useful_symbol_duration() const { return 1.0 / subcarrier_spacing_hz; }
    double symbol_duration() const { return useful_symbol_duration() * (1.0 + cp_fraction); }
    double cp_duration() const { return cp_fraction * useful_symbol_duration(); }
    double bandwidth() const { return static_cast<double>(num_carriers) * subcarrier_spacing_hz; }
    double delay_bin_width() const { return 1.0 / bandwidth(); }
    double wavelength() const;

    /// Baseband frequency of carrier row m, (m - M/2) * spacing.
    double carrier_offset_hz(std::size_t m) const {
        return (static_cast<double>(m) - static_cast<double>(num_carriers / 2)) *
               subcarrier_spacing_hz;
    }

    friend bool operator==(const Numerology&, const Numerology&) = default;
};

struct PrbShape {
    std::size_t carriers = 12;
    std::size_t symbols = 7;
};

/// One user's claim on a horizontal run of PRBs: carrier block `prb_row`,
/// slot columns `first_col..last_col` inclusive. PRBs that start inside the
/// grid but overhang its edge are clipped to the grid.
struct PrbTile {
    int user_id = 0;
    std::size_t prb_row = 0;
    std::size_t first_col = 0;
    std::size_t last_col = 0;
};

struct AllocationMask {
    int user_id = 0;
    Matrix<std::uint8_t> mask;

    std::size_t count() const;
};

struct ResourceGrid {
    Numerology numerology;
    Matrix<cdouble> symbols;
    std::vector<AllocationMask> masks;  // sorted by user_id

    const AllocationMask& mask_for(int user_id) const;
    bool has_user(int user_id) const;
    /// Union of all user masks.
    Matrix<std::uint8_t> occupied() const;
};

/// Fills every allocated resource element with a seeded QPSK symbol of unit
/// modulus; everything else stays exactly zero.
ResourceGrid build_grid(const Numerology& numerology, std::span<const PrbTile> tiles,
                        std::uint64_t rng_seed, const PrbShape& shape = {});

/// Copy of `grid` with only `user_id`'s elements kept.
ResourceGrid user_subgrid(const ResourceGrid& grid, int user_id);

/// Tiles that give `user_id` every resource element of the grid.
std::vector<PrbTile> full_allocation(const Numerology& numerology, int user_id,
                                     const PrbShape& shape = {});

/// Each PRB is allocated with probability `density` to one of `num_users`
/// users (ids 0..num_users-1) drawn uniformly; the rest stay blank.
std::vector<PrbTile> random_allocation(const Numerology& numerology, double density,
                                       int num_users, std::uint64_t seed,
                                       const PrbShape& shape = {});

std::size_t prb_rows(const Numerology& numerology, const PrbShape& shape = {});
std::size_t prb_cols(const Numerology& numerology, const PrbShape& shape = {});

}  // namespace cpcl
