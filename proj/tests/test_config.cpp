#include "small_system.hpp"

#include "ivr/config.hpp"
#include "ivr/errors.hpp"
#include "ivr/io.hpp"

#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>

using namespace ivr;

TEST(Config, DefaultsAndOverrides)
{
    const auto cfg = load_config("", {"control.T_fs=250", "run.threads=3", "basis.couplings=exact"});
    EXPECT_DOUBLE_EQ(cfg.T_fs, 250.0);
    EXPECT_EQ(cfg.threads, 3);
    EXPECT_EQ(cfg.hamiltonian.couplings, Couplings::Exact);
    EXPECT_EQ(cfg.cs_grid.N, 512);
}

TEST(Config, UnknownKeysAndBadValuesRejected)
{
    EXPECT_THROW(load_config("", {"control.nonsense=1"}), ConfigError);
    EXPECT_THROW(load_config("", {"nosection.T_fs=1"}), ConfigError);
    EXPECT_THROW(load_config("", {"control.T_fs=abc"}), ConfigError);
    EXPECT_THROW(load_config("", {"control.mode=sideways"}), ConfigError);
    EXPECT_THROW(load_config("", {"missing_equals"}), ConfigError);
}

TEST(Config, IniFile)
{
    const auto path = std::filesystem::temp_directory_path() / "ivr_test_config.ini";
    {
        std::ofstream f(path);
        f << "[control]\nT_fs = 1500\nmode = min\n[run]\nseed = 42\n";
    }
    const auto cfg = load_config(path.string(), {"run.seed=7"});
    EXPECT_DOUBLE_EQ(cfg.T_fs, 1500.0);
    EXPECT_EQ(cfg.mode, ControlMode::Minimize);
    EXPECT_EQ(cfg.seed, 7u);
    {
        std::ofstream f(path);
        f << "[control]\nT_fz = 1\n";
    }
    EXPECT_THROW(load_config(path.string()), ConfigError);
    std::filesystem::remove(path);
    EXPECT_THROW(load_config(path.string()), ConfigError);
}

TEST(Config, HashTracksContent)
{
    const RunConfig a;
    const auto b = load_config("", {"control.T_fs=101"});
    EXPECT_EQ(a.hash(), RunConfig{}.hash());
    EXPECT_NE(a.hash(), b.hash());
    EXPECT_EQ(a.hash({"model", "dvr", "basis"}), b.hash({"model", "dvr", "basis"}));
    EXPECT_EQ(a.hash_hex().size(), 16u);
}

TEST(Config, SchemaCoversCanonicalKeys)
{
    const auto canon = RunConfig{}.canonical();
    const auto schema = config_schema();
    EXPECT_EQ(schema.size(), canon.size());
    for (const auto& row : schema)
        EXPECT_TRUE(canon.count(row[0])) << row[0];
}

TEST(Config, SubsetResolution)
{
    const auto& s = small_system();
    RunConfig cfg = s.cfg;
    cfg.subset = "top3";
    EXPECT_EQ(resolve_subset(cfg, s.sys.pb), (std::vector<int>{11, 10, 9}));
    cfg.subset = "2,5";
    EXPECT_EQ(resolve_subset(cfg, s.sys.pb), (std::vector<int>{2, 5}));
    cfg.subset = "top13";
    EXPECT_THROW(resolve_subset(cfg, s.sys.pb), Error);
}

TEST(Io, ResonanceCacheRoundTrip)
{
    const auto& s = small_system();
    const auto r = compute_resonances(s.cfg, s.sys, Solver::Feshbach);
    const auto path = (std::filesystem::temp_directory_path() / "ivr_test_res.bin").string();
    save_resonances(path, r);
    const auto back = load_resonances(path);
    ASSERT_TRUE(back.has_value());
    EXPECT_EQ(back->solver, r.solver);
    EXPECT_EQ((back->E - r.E).cwiseAbs().maxCoeff(), 0.0);
    EXPECT_EQ((back->a - r.a).cwiseAbs().maxCoeff(), 0.0);
    EXPECT_EQ(back->anchor, r.anchor);
    EXPECT_EQ((back->offset - r.offset).cwiseAbs().maxCoeff(), 0.0);
    std::filesystem::remove(path);
    EXPECT_FALSE(load_resonances(path).has_value());
}

TEST(Io, NumberFormatRoundTrips)
{
    for (double v : {0.1, 1.0 / 3.0, 6.02214076e23, -2.5e-300})
        EXPECT_EQ(std::stod(format_number(v)), v);
}
