#pragma once

#include "bgev/distributions.hpp"
#include "bgev/errors.hpp"
#include "bgev/inference.hpp"
#include "bgev/io.hpp"
#include "bgev/priors.hpp"
#include "bgev/random.hpp"
#include "bgev/scoring.hpp"
#include "bgev/simstudy.hpp"
#include "bgev/special.hpp"
#include "bgev/stats.hpp"
#include "bgev/twostep.hpp"
#include "bgev/version.hpp"
