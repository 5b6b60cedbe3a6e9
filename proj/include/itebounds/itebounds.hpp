#pragma once

#include "itebounds/binary.hpp"
#include "itebounds/cli.hpp"
#include "itebounds/core.hpp"
#include "itebounds/frechet_pmf.hpp"
#include "itebounds/interval.hpp"
#include "itebounds/io.hpp"
#include "itebounds/makarov.hpp"
#include "itebounds/oracle.hpp"
#include "itebounds/trial.hpp"
