//! Heuristic × construct cases with their exact expected hint.

use stepwise_core::hint::Heuristic;
use stepwise_core::syntax::Construct;

pub struct GoldenCase {
    pub name: &'static str,
    pub heuristic: Heuristic,
    pub construct: Construct,
    pub student: &'static str,
    pub llm: &'static str,
    pub model: &'static str,
    pub expected: &'static str,
}

pub fn cases() -> Vec<GoldenCase> {
    use Construct::*;
    use Heuristic::*;
    vec![
        // new function: header plus placeholder body
        GoldenCase {
            name: "add-function",
            heuristic: AdditiveStatementIsolation,
            construct: FunctionDecl,
            student: "fun main() {\n    println(\"Welcome\")\n}\n",
            llm: "fun isValid(guess: String, length: Int): Boolean {\n    val ok = guess.length == length\n    if (!ok) {\n        println(\"wrong length\")\n    }\n    return ok\n}\n\nfun main() {\n    println(\"Welcome\")\n}\n",
            model: "fun isValid(guess: String, length: Int): Boolean {\n    val ok = guess.length == length\n    if (!ok) {\n        println(\"wrong length\")\n    }\n    return ok\n}\n\nfun main() {\n    println(\"Welcome\")\n}\n",
            expected: "fun isValid(guess: String, length: Int): Boolean {\n    TODO(\"Implement this function\")\n}\n\nfun main() {\n    println(\"Welcome\")\n}\n",
        },
        GoldenCase {
            name: "add-if",
            heuristic: AdditiveStatementIsolation,
            construct: If,
            student: "fun main() {\n    val month = readln().toInt()\n}\n",
            llm: "fun main() {\n    val month = readln().toInt()\n    if (month > 6) {\n        println(\"late\")\n    } else {\n        println(\"early\")\n    }\n}\n",
            model: "fun main() {\n    val month = readln().toInt()\n    if (month > 6) {\n        println(\"late\")\n    } else {\n        println(\"early\")\n    }\n}\n",
            expected: "fun main() {\n    val month = readln().toInt()\n    if (month > 6) {\n        TODO(\"Implement this function\")\n    }\n}\n",
        },
        GoldenCase {
            name: "add-when",
            heuristic: AdditiveStatementIsolation,
            construct: When,
            student: "fun main() {\n    val day = readln().toInt()\n}\n",
            llm: "fun main() {\n    val day = readln().toInt()\n    when (day) {\n        6, 7 -> println(\"weekend\")\n        else -> println(\"workday\")\n    }\n}\n",
            model: "fun main() {\n    val day = readln().toInt()\n    when (day) {\n        6, 7 -> println(\"weekend\")\n        else -> println(\"workday\")\n    }\n}\n",
            expected: "fun main() {\n    val day = readln().toInt()\n    when (day) {\n        else -> TODO(\"Implement this function\")\n    }\n}\n",
        },
        GoldenCase {
            name: "add-for",
            heuristic: AdditiveStatementIsolation,
            construct: For,
            student: "fun main() {\n    val n = readln().toInt()\n}\n",
            llm: "fun main() {\n    val n = readln().toInt()\n    for (i in 1..n) {\n        println(i * i)\n    }\n}\n",
            model: "fun main() {\n    val n = readln().toInt()\n    for (i in 1..n) {\n        println(i * i)\n    }\n}\n",
            expected: "fun main() {\n    val n = readln().toInt()\n    for (i in 1..n) {\n        TODO(\"Implement this function\")\n    }\n}\n",
        },
        GoldenCase {
            name: "add-while",
            heuristic: AdditiveStatementIsolation,
            construct: While,
            student: "fun main() {\n    var n = readln().toInt()\n}\n",
            llm: "fun main() {\n    var n = readln().toInt()\n    while (n > 0) {\n        println(n)\n        n = n - 1\n    }\n}\n",
            model: "fun main() {\n    var n = readln().toInt()\n    while (n > 0) {\n        println(n)\n        n = n - 1\n    }\n}\n",
            expected: "fun main() {\n    var n = readln().toInt()\n    while (n > 0) {\n        TODO(\"Implement this function\")\n    }\n}\n",
        },
        GoldenCase {
            name: "add-do-while",
            heuristic: AdditiveStatementIsolation,
            construct: DoWhile,
            student: "fun main() {\n    var guess = \"\"\n}\n",
            llm: "fun main() {\n    var guess = \"\"\n    do {\n        guess = readln()\n    } while (guess != \"ACEB\")\n}\n",
            model: "fun main() {\n    var guess = \"\"\n    do {\n        guess = readln()\n    } while (guess != \"ACEB\")\n    println(\"Done\")\n}\n",
            expected: "fun main() {\n    var guess = \"\"\n    do {\n        TODO(\"Implement this function\")\n    } while (guess != \"ACEB\")\n}\n",
        },
        // header and body changed: header only
        GoldenCase {
            name: "signature-and-body",
            heuristic: IntrinsicStructureModificationFocus,
            construct: FunctionDecl,
            student: "fun total(a: Int, b: Int) {\n    println(a)\n}\n",
            llm: "fun total(a: Int, b: Int): Int {\n    val s = a + b\n    println(s)\n    return s\n}\n",
            model: "fun total(a: Int, b: Int): Int {\n    val s = a + b\n    println(s)\n    println(a)\n    return s\n}\n",
            expected: "fun total(a: Int, b: Int): Int {\n    println(a)\n}\n",
        },
        GoldenCase {
            name: "if-condition-and-body",
            heuristic: IntrinsicStructureModificationFocus,
            construct: If,
            student: "fun check(x: Int) {\n    if (x > 0) {\n        println(x)\n    }\n}\n",
            llm: "fun check(x: Int) {\n    if (x > 1) {\n        println(x + 1)\n        println(x)\n    }\n}\n",
            model: "fun check(x: Int) {\n    if (x > 1) {\n        println(x + 1)\n        println(x)\n    }\n    println(0)\n}\n",
            expected: "fun check(x: Int) {\n    if (x > 1) {\n        println(x)\n    }\n}\n",
        },
        GoldenCase {
            name: "when-subject-and-branches",
            heuristic: IntrinsicStructureModificationFocus,
            construct: When,
            student: "fun name(d: Int, m: Int) {\n    when (m) {\n        1 -> println(\"one\")\n    }\n}\n",
            llm: "fun name(d: Int, m: Int) {\n    when (d) {\n        1 -> println(\"one\")\n        2 -> println(\"two\")\n    }\n}\n",
            model: "fun name(d: Int, m: Int) {\n    when (d) {\n        1 -> println(\"one\")\n        2 -> println(\"two\")\n    }\n    println(m)\n}\n",
            expected: "fun name(d: Int, m: Int) {\n    when (d) {\n        1 -> println(\"one\")\n    }\n}\n",
        },
        GoldenCase {
            name: "for-range-and-body",
            heuristic: IntrinsicStructureModificationFocus,
            construct: For,
            student: "fun count(s: String): Int {\n    var c = 0\n    for (i in 0..s.length) {\n    }\n    return c\n}\n",
            llm: "fun count(s: String): Int {\n    var c = 0\n    for (i in 0..s.length - 1) {\n        c += 1\n    }\n    return c\n}\n",
            model: "fun count(s: String): Int {\n    var c = 0\n    for (i in 0..s.length - 1) {\n        c += 1\n    }\n    return c\n}\n",
            expected: "fun count(s: String): Int {\n    var c = 0\n    for (i in 0..s.length - 1) {\n    }\n    return c\n}\n",
        },
        GoldenCase {
            name: "while-condition-and-body",
            heuristic: IntrinsicStructureModificationFocus,
            construct: While,
            student: "fun main() {\n    var guess = readln()\n    while (isValid(guess, 4)) {\n    }\n}\n",
            llm: "fun main() {\n    var guess = readln()\n    while (!isValid(guess, 4)) {\n        guess = readln()\n    }\n}\n",
            model: "fun main() {\n    var guess = readln()\n    while (!isValid(guess, 4)) {\n        guess = readln()\n    }\n    println(guess)\n}\n",
            expected: "fun main() {\n    var guess = readln()\n    while (!isValid(guess, 4)) {\n    }\n}\n",
        },
        GoldenCase {
            name: "do-while-condition-and-body",
            heuristic: IntrinsicStructureModificationFocus,
            construct: DoWhile,
            student: "fun main() {\n    var n = 0\n    do {\n        n = n + 1\n    } while (n < 3)\n}\n",
            llm: "fun main() {\n    var n = 0\n    do {\n        println(n)\n        n = n + 1\n    } while (n < 10)\n}\n",
            model: "fun main() {\n    var n = 0\n    do {\n        println(n)\n        n = n + 1\n    } while (n < 10)\n    println(n)\n}\n",
            expected: "fun main() {\n    var n = 0\n    do {\n        n = n + 1\n    } while (n < 10)\n}\n",
        },
        // several body changes: the first one only
        GoldenCase {
            name: "function-body-two-statements",
            heuristic: InternalBodyChangeDetection,
            construct: FunctionDecl,
            student: "fun main() {\n    println(\"Welcome\")\n}\n",
            llm: "fun main() {\n    println(\"Welcome\")\n    val secret = getHiddenSecret()\n    println(secret)\n}\n",
            model: "fun main() {\n    println(\"Welcome\")\n    val secret = getHiddenSecret()\n    println(secret)\n    println(\"Bye\")\n}\n",
            expected: "fun main() {\n    println(\"Welcome\")\n    val secret = getHiddenSecret()\n}\n",
        },
        GoldenCase {
            name: "if-body-two-statements",
            heuristic: InternalBodyChangeDetection,
            construct: If,
            student: "fun f(x: Int) {\n    if (x > 0) {\n        var y = 0\n    }\n}\n",
            llm: "fun f(x: Int) {\n    if (x > 0) {\n        println(x)\n        var y = 0\n        y = x\n    }\n}\n",
            model: "fun f(x: Int) {\n    if (x > 0) {\n        println(x)\n        var y = 0\n        y = x\n    }\n    println(0)\n}\n",
            expected: "fun f(x: Int) {\n    if (x > 0) {\n        println(x)\n        var y = 0\n    }\n}\n",
        },
        GoldenCase {
            name: "when-two-branches",
            heuristic: InternalBodyChangeDetection,
            construct: When,
            student: "fun season(month: Int): String {\n    var result = \"Unknown\"\n    when (month) {\n        12, 1, 2 -> result = \"Winter\"\n    }\n    return result\n}\n",
            llm: "fun season(month: Int): String {\n    var result = \"Unknown\"\n    when (month) {\n        12, 1, 2 -> result = \"Winter\"\n        3, 4, 5 -> result = \"Spring\"\n        6, 7, 8 -> result = \"Summer\"\n    }\n    return result\n}\n",
            model: "fun season(month: Int): String {\n    var result = \"Unknown\"\n    when (month) {\n        12, 1, 2 -> result = \"Winter\"\n        3, 4, 5 -> result = \"Spring\"\n        6, 7, 8 -> result = \"Summer\"\n    }\n    return result\n}\n",
            expected: "fun season(month: Int): String {\n    var result = \"Unknown\"\n    when (month) {\n        12, 1, 2 -> result = \"Winter\"\n        3, 4, 5 -> result = \"Spring\"\n    }\n    return result\n}\n",
        },
        GoldenCase {
            name: "for-body-two-statements",
            heuristic: InternalBodyChangeDetection,
            construct: For,
            student: "fun main() {\n    for (i in 1..3) {\n    }\n}\n",
            llm: "fun main() {\n    for (i in 1..3) {\n        val sq = i * i\n        println(sq)\n    }\n}\n",
            model: "fun main() {\n    for (i in 1..3) {\n        val sq = i * i\n        println(sq)\n    }\n    println(\"Done\")\n}\n",
            expected: "fun main() {\n    for (i in 1..3) {\n        val sq = i * i\n    }\n}\n",
        },
        GoldenCase {
            name: "while-body-two-statements",
            heuristic: InternalBodyChangeDetection,
            construct: While,
            student: "fun main() {\n    var n = 3\n    while (n > 0) {\n    }\n}\n",
            llm: "fun main() {\n    var n = 3\n    while (n > 0) {\n        println(n)\n        n = n - 1\n    }\n}\n",
            model: "fun main() {\n    var n = 3\n    while (n > 0) {\n        println(n)\n        n = n - 1\n    }\n    println(\"Go\")\n}\n",
            expected: "fun main() {\n    var n = 3\n    while (n > 0) {\n        println(n)\n    }\n}\n",
        },
        GoldenCase {
            name: "do-while-body-two-statements",
            heuristic: InternalBodyChangeDetection,
            construct: DoWhile,
            student: "fun main() {\n    var guess = \"\"\n    do {\n    } while (guess != \"ACEB\")\n}\n",
            llm: "fun main() {\n    var guess = \"\"\n    do {\n        guess = readln()\n        println(guess.length)\n    } while (guess != \"ACEB\")\n}\n",
            model: "fun main() {\n    var guess = \"\"\n    do {\n        guess = readln()\n        println(guess.length)\n    } while (guess != \"ACEB\")\n    println(\"Done\")\n}\n",
            expected: "fun main() {\n    var guess = \"\"\n    do {\n        guess = readln()\n    } while (guess != \"ACEB\")\n}\n",
        },
    ]
}
