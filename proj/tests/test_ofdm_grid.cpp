#include <gtest/gtest.h>

#include <cmath>
#include <complex>
#include <vector>

#include "cpcl/error.hpp"
#include "cpcl/ofdm_grid.hpp"

using namespace cpcl;

namespace {

// Three users interleaved in frequency and time on the default 72 x 28
// grid (6 x 4 PRBs), a few PRBs left blank.
std::vector<PrbTile> three_user_tiles() {
    return {
        {0, 0, 0, 1}, {1, 1, 0, 0}, {2, 1, 1, 3}, {1, 2, 0, 3},
        {2, 3, 0, 1}, {0, 3, 2, 3}, {0, 4, 1, 2}, {2, 5, 0, 0},
    };
}

int expected_owner(const std::vector<PrbTile>& tiles, std::size_t m, std::size_t d) {
    for (const auto& t : tiles) {
        const bool rows = m / 12 == t.prb_row;
        const bool cols = d / 7 >= t.first_col && d / 7 <= t.last_col;
        if (rows && cols) return t.user_id;
    }
    return -1;
}

template <typename F>
ErrorCode code_of(F&& f) {
    try {
        f();
    } catch (const Error& e) {
        return e.code();
    }
    ADD_FAILURE() << "expected an Error";
    return ErrorCode::InvalidArgument;
}

}  // namespace

TEST(Numerology, DerivedDurations) {
    Numerology nu;
    EXPECT_DOUBLE_EQ(nu.useful_symbol_duration(), 1.0 / 15e3);
    EXPECT_DOUBLE_EQ(nu.symbol_duration(), (1.0 / 15e3) * (1.0 + 1.0 / 14.0));
    EXPECT_DOUBLE_EQ(nu.bandwidth(), 72 * 15e3);
    EXPECT_DOUBLE_EQ(nu.carrier_offset_hz(36), 0.0);
    EXPECT_DOUBLE_EQ(nu.carrier_offset_hz(0), -36 * 15e3);
}

TEST(Numerology, RejectsInvalidFields) {
    Numerology nu;
    nu.subcarrier_spacing_hz = 0.0;
    EXPECT_EQ(code_of([&] { nu.validate(); }), ErrorCode::InvalidArgument);
    nu = {};
    nu.num_carriers = 11;
    EXPECT_EQ(code_of([&] { nu.validate(); }), ErrorCode::InvalidArgument);
    nu = {};
    nu.cp_fraction = 0.6;
    EXPECT_EQ(code_of([&] { nu.validate(); }), ErrorCode::InvalidArgument);
    nu = {};
    nu.cp_fraction = -0.1;
    EXPECT_EQ(code_of([&] { nu.validate(); }), ErrorCode::InvalidArgument);
    nu = {};
    EXPECT_NO_THROW(nu.validate());
}

TEST(BuildGrid, ThreeUserSupportEqualsUnionOfTiles) {
    const Numerology nu;
    const auto tiles = three_user_tiles();
    const ResourceGrid g = build_grid(nu, tiles, 42);
    ASSERT_EQ(g.masks.size(), 3u);
    for (std::size_t m = 0; m < nu.num_carriers; ++m) {
        for (std::size_t d = 0; d < nu.num_symbols; ++d) {
            const int owner = expected_owner(tiles, m, d);
            const cdouble s = g.symbols(m, d);
            if (owner < 0) {
                EXPECT_EQ(s, cdouble{}) << m << "," << d;
            } else {
                EXPECT_NEAR(std::abs(s), 1.0, 1e-15);
                EXPECT_NEAR(std::abs(s.real()), std::sqrt(0.5), 1e-15);
                EXPECT_EQ(g.mask_for(owner).mask(m, d), 1);
            }
        }
    }
}

TEST(BuildGrid, MasksAreDisjointAndCoverNonzeros) {
    const Numerology nu;
    const ResourceGrid g = build_grid(nu, three_user_tiles(), 7);
    for (std::size_t i = 0; i < g.symbols.size(); ++i) {
        int owners = 0;
        for (const auto& mask : g.masks) owners += mask.mask.values()[i];
        EXPECT_LE(owners, 1);
        EXPECT_EQ(owners == 1, g.symbols.values()[i] != cdouble{});
    }
}

TEST(BuildGrid, FullAllocationHasNoZeros) {
    const Numerology nu;
    const ResourceGrid g = build_grid(nu, full_allocation(nu, 3), 1);
    ASSERT_EQ(g.masks.size(), 1u);
    EXPECT_EQ(g.masks[0].user_id, 3);
    EXPECT_EQ(g.masks[0].count(), nu.num_carriers * nu.num_symbols);
    for (const auto& s : g.symbols.values()) EXPECT_NE(s, cdouble{});
}

TEST(BuildGrid, SameSeedIsBitIdenticalOtherSeedDiffers) {
    const Numerology nu;
    const auto tiles = three_user_tiles();
    const ResourceGrid a = build_grid(nu, tiles, 99);
    const ResourceGrid b = build_grid(nu, tiles, 99);
    const ResourceGrid c = build_grid(nu, tiles, 100);
    EXPECT_EQ(a.symbols, b.symbols);
    EXPECT_NE(a.symbols, c.symbols);
}

TEST(BuildGrid, OverlapIsRejected) {
    const Numerology nu;
    const std::vector<PrbTile> tiles{{0, 1, 0, 2}, {1, 1, 2, 3}};
    EXPECT_EQ(code_of([&] { build_grid(nu, tiles, 1); }), ErrorCode::OverlappingAllocation);
}

TEST(BuildGrid, SameUserMayRepeatATile) {
    const Numerology nu;
    const std::vector<PrbTile> tiles{{0, 1, 0, 2}, {0, 1, 2, 3}};
    EXPECT_NO_THROW(build_grid(nu, tiles, 1));
}

TEST(BuildGrid, OutOfBoundsIsRejected) {
    const Numerology nu;  // 6 PRB rows, 4 PRB columns
    const std::vector<PrbTile> row{{0, 6, 0, 0}};
    const std::vector<PrbTile> col{{0, 0, 2, 4}};
    EXPECT_EQ(code_of([&] { build_grid(nu, row, 1); }), ErrorCode::OutOfBounds);
    EXPECT_EQ(code_of([&] { build_grid(nu, col, 1); }), ErrorCode::OutOfBounds);
}

TEST(BuildGrid, OverhangingPrbIsClipped) {
    Numerology nu;
    nu.num_carriers = 30;  // rows 24..29 form a partial PRB
    nu.num_symbols = 10;   // columns 7..9 form a partial PRB
    const ResourceGrid g = build_grid(nu, full_allocation(nu, 0), 5);
    EXPECT_EQ(prb_rows(nu), 3u);
    EXPECT_EQ(prb_cols(nu), 2u);
    EXPECT_EQ(g.masks[0].count(), 300u);
}

TEST(UserSubgrid, SupportEqualsUserMask) {
    const Numerology nu;
    const ResourceGrid g = build_grid(nu, three_user_tiles(), 3);
    const ResourceGrid u2 = user_subgrid(g, 2);
    EXPECT_EQ(u2.numerology, g.numerology);
    const auto& mask = g.mask_for(2).mask;
    for (std::size_t i = 0; i < g.symbols.size(); ++i) {
        EXPECT_EQ(u2.symbols.values()[i] != cdouble{}, mask.values()[i] == 1);
        if (mask.values()[i]) {
            EXPECT_EQ(u2.symbols.values()[i], g.symbols.values()[i]);
        }
    }
}

TEST(UserSubgrid, SingleUserIsIdentity) {
    const Numerology nu;
    const ResourceGrid g = build_grid(nu, full_allocation(nu, 0), 3);
    EXPECT_EQ(user_subgrid(g, 0).symbols, g.symbols);
}

TEST(UserSubgrid, SubgridsSumToGrid) {
    const Numerology nu;
    const ResourceGrid g = build_grid(nu, three_user_tiles(), 11);
    Matrix<cdouble> sum(g.symbols.rows(), g.symbols.cols());
    for (const auto& mask : g.masks) {
        const auto sub = user_subgrid(g, mask.user_id);
        for (std::size_t i = 0; i < sum.size(); ++i) sum.values()[i] += sub.symbols.values()[i];
    }
    EXPECT_EQ(sum, g.symbols);
}

TEST(UserSubgrid, UnknownUserIsRejected) {
    const Numerology nu;
    const ResourceGrid g = build_grid(nu, three_user_tiles(), 11);
    EXPECT_EQ(code_of([&] { user_subgrid(g, 5); }), ErrorCode::UnknownUser);
}

TEST(RandomAllocation, DensityAndDisjointness) {
    Numerology nu;
    nu.num_carriers = 600;
    nu.num_symbols = 140;
    const auto tiles = random_allocation(nu, 0.6, 3, 17);
    const double prbs = static_cast<double>(prb_rows(nu) * prb_cols(nu));
    EXPECT_NEAR(static_cast<double>(tiles.size()) / prbs, 0.6, 0.05);
    const ResourceGrid g = build_grid(nu, tiles, 1);
    EXPECT_EQ(g.masks.size(), 3u);
    EXPECT_EQ(random_allocation(nu, 0.6, 3, 17).size(), tiles.size());
    EXPECT_TRUE(random_allocation(nu, 0.0, 3, 17).empty());
    EXPECT_EQ(random_allocation(nu, 1.0, 1, 17).size(), static_cast<std::size_t>(prbs));
}
