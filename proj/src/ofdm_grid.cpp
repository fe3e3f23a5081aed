#include "cpcl/ofdm_grid.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <random>
#include <string>

#include "cpcl/error.hpp"
#include "cpcl/scene_geometry.hpp"

namespace cpcl {

void Numerology::validate() const {
    if (!(subcarrier_spacing_hz > 0.0) || !std::isfinite(subcarrier_spacing_hz))
        throw Error(ErrorCode::InvalidArgument, "subcarrier spacing must be positive");
    if (num_carriers < 12)
        throw Error(ErrorCode::InvalidArgument,
                    "need at least 12 carriers, got " + std::to_string(num_carriers));
    if (num_symbols < 1)
        throw Error(ErrorCode::InvalidArgument, "need at least one OFDM symbol");
    if (!(cp_fraction >= 0.0 && cp_fraction <= 0.5))
        throw Error(ErrorCode::InvalidArgument, "cp_fraction must lie in [0, 0.5]");
    if (!(carrier_frequency_hz > 0.0))
        throw Error(ErrorCode::InvalidArgument, "carrier frequency must be positive");
}

double Numerology::wavelength() const { return kSpeedOfLight / carrier_frequency_hz; }

std::size_t AllocationMask::count() const {
    return static_cast<std::size_t>(std::count(mask.values().begin(), mask.values().end(), 1));
}

const AllocationMask& ResourceGrid::mask_for(int user_id) const {
    for (const auto& m : masks)
        if (m.user_id == user_id) return m;
    throw Error(ErrorCode::UnknownUser, "user " + std::to_string(user_id) + " owns no PRBs");
}

bool ResourceGrid::has_user(int user_id) const {
    return std::any_of(masks.begin(), masks.end(),
                       [&](const AllocationMask& m) { return m.user_id == user_id; });
}

Matrix<std::uint8_t> ResourceGrid::occupied() const {
    Matrix<std::uint8_t> out(symbols.rows(), symbols.cols(), 0);
    for (const auto& m : masks)
        for (std::size_t i = 0; i < out.size(); ++i) out.values()[i] |= m.mask.values()[i];
    return out;
}

std::size_t prb_rows(const Numerology& numerology, const PrbShape& shape) {
    return (numerology.num_carriers + shape.carriers - 1) / shape.carriers;
}

std::size_t prb_cols(const Numerology& numerology, const PrbShape& shape) {
    return (numerology.num_symbols + shape.symbols - 1) / shape.symbols;
}

namespace {

cdouble qpsk_symbol(std::uint64_t bits) {
    constexpr double a = 0.70710678118654752440;
    return {(bits & 1U) ? -a : a, (bits & 2U) ? -a : a};
}

}  // namespace

ResourceGrid build_grid(const Numerology& numerology, std::span<const PrbTile> tiles,
                        std::uint64_t rng_seed, const PrbShape& shape) {
    numerology.validate();
    if (shape.carriers == 0 || shape.symbols == 0)
        throw Error(ErrorCode::InvalidArgument, "PRB shape must be non-empty");

    const std::size_t M = numerology.num_carriers;
    const std::size_t D = numerology.num_symbols;
    // -1 marks a free resource element.
    Matrix<int> owner(M, D, -1);
    std::map<int, Matrix<std::uint8_t>> masks;

    for (const auto& tile : tiles) {
        if (tile.user_id < 0)
            throw Error(ErrorCode::InvalidArgument, "user ids must be non-negative");
        if (tile.first_col > tile.last_col)
            throw Error(ErrorCode::InvalidArgument, "tile column range is reversed");
        const std::size_t m0 = tile.prb_row * shape.carriers;
        const std::size_t d0 = tile.first_col * shape.symbols;
        if (m0 >= M || tile.last_col * shape.symbols >= D)
            throw Error(ErrorCode::OutOfBounds,
                        "tile for user " + std::to_string(tile.user_id) + " at PRB row " +
                            std::to_string(tile.prb_row) + " cols " +
                            std::to_string(tile.first_col) + ".." +
                            std::to_string(tile.last_col) + " exceeds the grid");
        const std::size_t m1 = std::min(M, m0 + shape.carriers);
        const std::size_t d1 = std::min(D, (tile.last_col + 1) * shape.symbols);

        auto [it, inserted] = masks.try_emplace(tile.user_id, M, D, std::uint8_t{0});
        auto& mask = it->second;
        for (std::size_t m = m0; m < m1; ++m) {
            for (std::size_t d = d0; d < d1; ++d) {
                int& o = owner(m, d);
                if (o >= 0 && o != tile.user_id)
                    throw Error(ErrorCode::OverlappingAllocation,
                                "users " + std::to_string(o) + " and " +
                                    std::to_string(tile.user_id) +
                                    " both claim carrier " + std::to_string(m) + ", symbol " +
                                    std::to_string(d));
                o = tile.user_id;
                mask(m, d) = 1;
            }
        }
    }

    ResourceGrid grid;
    grid.numerology = numerology;
    grid.symbols = Matrix<cdouble>(M, D, cdouble{});
    std::mt19937_64 rng(rng_seed);
    for (std::size_t i = 0; i < owner.size(); ++i)
        if (owner.values()[i] >= 0) grid.symbols.values()[i] = qpsk_symbol(rng());

    grid.masks.reserve(masks.size());
    for (auto& [user, mask] : masks) grid.masks.push_back({user, std::move(mask)});
    return grid;
}

ResourceGrid user_subgrid(const ResourceGrid& grid, int user_id) {
    const auto& mask = grid.mask_for(user_id);
    ResourceGrid out;
    out.numerology = grid.numerology;
    out.symbols = Matrix<cdouble>(grid.symbols.rows(), grid.symbols.cols(), cdouble{});
    for (std::size_t i = 0; i < mask.mask.size(); ++i)
        if (mask.mask.values()[i]) out.symbols.values()[i] = grid.symbols.values()[i];
    out.masks.push_back(mask);
    return out;
}

std::vector<PrbTile> full_allocation(const Numerology& numerology, int user_id,
                                     const PrbShape& shape) {
    const std::size_t rows = prb_rows(numerology, shape);
    const std::size_t cols = prb_cols(numerology, shape);
    std::vector<PrbTile> tiles;
    tiles.reserve(rows);
    for (std::size_t r = 0; r < rows; ++r) tiles.push_back({user_id, r, 0, cols - 1});
    return tiles;
}

std::vector<PrbTile> random_allocation(const Numerology& numerology, double density,
                                       int num_users, std::uint64_t seed,
                                       const PrbShape& shape) {
    if (!(density >= 0.0 && density <= 1.0))
        throw Error(ErrorCode::InvalidArgument, "density must lie in [0, 1]");
    if (num_users < 1) throw Error(ErrorCode::InvalidArgument, "need at least one user");

    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> coin(0.0, 1.0);
    std::uniform_int_distribution<int> pick(0, num_users - 1);
    std::vector<PrbTile> tiles;
    for (std::size_t r = 0; r < prb_rows(numerology, shape); ++r) {
        for (std::size_t c = 0; c < prb_cols(numerology, shape); ++c) {
            // Draw both numbers every time so the pattern for a given seed does
            // not depend on the outcome of earlier coins.
            const double u = coin(rng);
            const int user = pick(rng);
            if (u < density) tiles.push_back({user, r, c, c});
        }
    }
    return tiles;
}

}  // namespace cpcl
