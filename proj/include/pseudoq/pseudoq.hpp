#pragma once

#include "pseudoq/decomp.hpp"
#include "pseudoq/errors.hpp"
#include "pseudoq/factorization.hpp"
#include "pseudoq/io.hpp"
#include "pseudoq/locc.hpp"
#include "pseudoq/matrix.hpp"
#include "pseudoq/pseudometric.hpp"
#include "pseudoq/random.hpp"
#include "pseudoq/representation.hpp"
#include "pseudoq/selftest.hpp"
