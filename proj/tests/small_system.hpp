#pragma once

#include "ivr/pipeline.hpp"

// Truncated bases on coarse grids: 12 CS x 4 CO products, fast enough for every test.
inline ivr::RunConfig small_config()
{
    ivr::RunConfig cfg;
    cfg.cs_grid = {1.6, 12.0, 160};
    cfg.co_grid = {1.4, 10.0, 120};
    cfg.cs_max_states = 12;
    cfg.co_max_states = 4;
    return cfg;
}

struct SmallSystem
{
    ivr::RunConfig cfg = small_config();
    ivr::BondBases bases = ivr::build_bases(cfg);
    ivr::QuantumSystem sys = ivr::build_system(cfg, bases);
};

inline const SmallSystem& small_system()
{
    static const SmallSystem s;
    return s;
}
