#pragma once

#include "promarket/demand.hpp"
#include "promarket/distributions.hpp"
#include "promarket/equilibrium.hpp"
#include "promarket/io.hpp"
#include "promarket/market.hpp"
#include "promarket/mechanisms.hpp"
#include "promarket/numeric.hpp"
#include "promarket/rng.hpp"
#include "promarket/search.hpp"
#include "promarket/welfare.hpp"
