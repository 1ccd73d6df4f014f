#pragma once

#include "fundchoice/choice.hpp"
#include "fundchoice/consideration.hpp"
#include "fundchoice/error.hpp"
#include "fundchoice/game.hpp"
#include "fundchoice/model.hpp"
#include "fundchoice/parallel.hpp"
#include "fundchoice/welfare.hpp"
