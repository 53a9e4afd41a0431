#pragma once

#include "bml/context.hpp"
#include "bml/corpus.hpp"
#include "bml/cs4.hpp"
#include "bml/kripke.hpp"
#include "bml/lambox.hpp"
#include "bml/lambox_syntax.hpp"
#include "bml/model_io.hpp"
#include "bml/names.hpp"
#include "bml/parser.hpp"
#include "bml/reduction.hpp"
#include "bml/relation.hpp"
#include "bml/substitution.hpp"
#include "bml/syntax.hpp"
#include "bml/typing.hpp"
