#pragma once

#include "ringcorr/errors.hpp"
#include "ringcorr/model.hpp"
#include "ringcorr/theta.hpp"
#include "ringcorr/quantum.hpp"
#include "ringcorr/classical.hpp"
#include "ringcorr/limits.hpp"
#include "ringcorr/selftest.hpp"
