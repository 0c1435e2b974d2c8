#pragma once

#ifdef SPECDET_CATCH_SPLIT_HEADERS
#include <catch2/catch_all.hpp>
#else
#include "catch_amalgamated.hpp"
#endif
