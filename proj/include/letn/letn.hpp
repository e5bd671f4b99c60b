#pragma once

#include "letn/core.hpp"
#include "letn/random.hpp"
#include "letn/parallel.hpp"
#include "letn/signature.hpp"
#include "letn/dictionary.hpp"
#include "letn/community.hpp"
#include "letn/generate.hpp"
#include "letn/metrics.hpp"
#include "letn/io.hpp"
