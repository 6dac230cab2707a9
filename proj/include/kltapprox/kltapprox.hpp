#pragma once

#include "kltapprox/error.hpp"
#include "kltapprox/markov_klt.hpp"
#include "kltapprox/approx.hpp"
#include "kltapprox/metrics.hpp"
#include "kltapprox/search.hpp"
#include "kltapprox/fast_transforms.hpp"
#include "kltapprox/codec.hpp"
#include "kltapprox/report.hpp"
