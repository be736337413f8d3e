use std::fmt;

/// Parsed form of a type expression such as `Dict[str, List[int]]`.
///
/// `head` is a dotted identifier path. Two synthetic heads exist: `Union`
/// for `a | b` chains, and, in argument position only, `[]` for bracketed
/// parameter lists (`Callable[[int], str]`). An ellipsis or a literal
/// argument (`Literal["a"]`, `Tuple[int, ...]`) is kept as a leaf whose head
/// is its source text.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct TypeExprTree {
    pub head: String,
    pub args: Vec<TypeExprTree>,
}

pub(crate) const UNION_HEAD: &str = "Union";
pub(crate) const LIST_HEAD: &str = "[]";

impl TypeExprTree {
    pub fn leaf(head: impl Into<String>) -> Self {
        TypeExprTree {
            head: head.into(),
            args: Vec::new(),
        }
    }

    pub fn generic(head: impl Into<String>, args: Vec<TypeExprTree>) -> Self {
        TypeExprTree {
            head: head.into(),
            args,
        }
    }
}

impl fmt::Display for TypeExprTree {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.head == LIST_HEAD {
            f.write_str("[")?;
        } else {
            f.write_str(&self.head)?;
            if self.args.is_empty() {
                return Ok(());
            }
            f.write_str("[")?;
        }
        for (i, arg) in self.args.iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{arg}")?;
        }
        f.write_str("]")
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("cannot parse type `{input}` at column {column}: {message}")]
pub struct TypeParseError {
    pub input: String,
    /// 0-based character column of the offending token.
    pub column: usize,
    pub message: String,
}

#[derive(Debug, Clone, PartialEq)]
enum Token {
    Ident(String),
    Literal(String),
    Dot,
    Ellipsis,
    Open,
    Close,
    Comma,
    Pipe,
    End,
}

impl fmt::Display for Token {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Token::Ident(s) | Token::Literal(s) => write!(f, "`{s}`"),
            Token::Dot => f.write_str("`.`"),
            Token::Ellipsis => f.write_str("`...`"),
            Token::Open => f.write_str("`[`"),
            Token::Close => f.write_str("`]`"),
            Token::Comma => f.write_str("`,`"),
            Token::Pipe => f.write_str("`|`"),
            Token::End => f.write_str("end of input"),
        }
    }
}

fn tokenize(input: &str) -> Result<Vec<(Token, usize)>, TypeParseError> {
    let chars: Vec<char> = input.chars().collect();
    let err = |column: usize, message: String| TypeParseError {
        input: input.to_string(),
        column,
        message,
    };
    let mut tokens = Vec::new();
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        let start = i;
        match c {
            c if c.is_whitespace() => {
                i += 1;
                continue;
            }
            '[' => tokens.push((Token::Open, start)),
            ']' => tokens.push((Token::Close, start)),
            ',' => tokens.push((Token::Comma, start)),
            '|' => tokens.push((Token::Pipe, start)),
            '.' => {
                if chars[i..].starts_with(&['.', '.', '.']) {
                    tokens.push((Token::Ellipsis, start));
                    i += 3;
                    continue;
                }
                tokens.push((Token::Dot, start));
            }
            '"' | '\'' => {
                let quote = c;
                i += 1;
                while i < chars.len() && chars[i] != quote {
                    i += 1;
                }
                if i == chars.len() {
                    return Err(err(start, "unterminated string literal".into()));
                }
                let text: String = chars[start..=i].iter().collect();
                tokens.push((Token::Literal(text), start));
            }
            c if c.is_ascii_digit() || c == '-' => {
                i += 1;
                while i < chars.len() && chars[i].is_ascii_digit() {
                    i += 1;
                }
                let text: String = chars[start..i].iter().collect();
                if text == "-" {
                    return Err(err(start, "unexpected character `-`".into()));
                }
                tokens.push((Token::Literal(text), start));
                continue;
            }
            c if c.is_alphabetic() || c == '_' => {
                while i < chars.len() && (chars[i].is_alphanumeric() || chars[i] == '_') {
                    i += 1;
                }
                let text: String = chars[start..i].iter().collect();
                tokens.push((Token::Ident(text), start));
                continue;
            }
            other => return Err(err(start, format!("unexpected character `{other}`"))),
        }
        i += 1;
    }
    tokens.push((Token::End, chars.len()));
    Ok(tokens)
}

struct Parser<'a> {
    input: &'a str,
    tokens: Vec<(Token, usize)>,
    pos: usize,
}

impl Parser<'_> {
    fn peek(&self) -> &Token {
        &self.tokens[self.pos].0
    }

    fn column(&self) -> usize {
        self.tokens[self.pos].1
    }

    fn bump(&mut self) -> Token {
        let tok = self.tokens[self.pos].0.clone();
        if tok != Token::End {
            self.pos += 1;
        }
        tok
    }

    fn error(&self, message: impl Into<String>) -> TypeParseError {
        TypeParseError {
            input: self.input.to_string(),
            column: self.column(),
            message: message.into(),
        }
    }

    fn expect_close(&mut self) -> Result<(), TypeParseError> {
        match self.peek() {
            Token::Close => {
                self.bump();
                Ok(())
            }
            Token::End => Err(self.error("unbalanced brackets: missing `]`")),
            other => Err(self.error(format!("expected `,` or `]`, found {other}"))),
        }
    }

    fn union(&mut self) -> Result<TypeExprTree, TypeParseError> {
        let first = self.primary()?;
        if *self.peek() != Token::Pipe {
            return Ok(first);
        }
        let mut members = vec![first];
        while *self.peek() == Token::Pipe {
            self.bump();
            members.push(self.primary()?);
        }
        Ok(TypeExprTree::generic(UNION_HEAD, members))
    }

    fn path(&mut self) -> Result<String, TypeParseError> {
        let mut path = match self.bump() {
            Token::Ident(s) => s,
            Token::Dot => {
                self.pos -= 1;
                return Err(self.error("empty path segment"));
            }
            Token::End => return Err(self.error("expected a type name, found end of input")),
            other => {
                self.pos -= 1;
                return Err(self.error(format!("expected a type name, found {other}")));
            }
        };
        while *self.peek() == Token::Dot {
            self.bump();
            match self.peek().clone() {
                Token::Ident(s) => {
                    self.bump();
                    path.push('.');
                    path.push_str(&s);
                }
                _ => return Err(self.error("empty path segment")),
            }
        }
        Ok(path)
    }

    fn primary(&mut self) -> Result<TypeExprTree, TypeParseError> {
        let head = self.path()?;
        if *self.peek() != Token::Open {
            return Ok(TypeExprTree::leaf(head));
        }
        self.bump();
        if *self.peek() == Token::Close {
            return Err(self.error("empty type argument list"));
        }
        let args = self.args()?;
        self.expect_close()?;
        Ok(TypeExprTree::generic(head, args))
    }

    fn args(&mut self) -> Result<Vec<TypeExprTree>, TypeParseError> {
        let mut args = vec![self.arg()?];
        while *self.peek() == Token::Comma {
            self.bump();
            args.push(self.arg()?);
        }
        Ok(args)
    }

    fn arg(&mut self) -> Result<TypeExprTree, TypeParseError> {
        match self.peek().clone() {
            Token::Open => {
                self.bump();
                if *self.peek() == Token::Close {
                    self.bump();
                    return Ok(TypeExprTree::leaf(LIST_HEAD));
                }
                let items = self.args()?;
                self.expect_close()?;
                Ok(TypeExprTree::generic(LIST_HEAD, items))
            }
            Token::Ellipsis => {
                self.bump();
                Ok(TypeExprTree::leaf("..."))
            }
            Token::Literal(text) => {
                self.bump();
                Ok(TypeExprTree::leaf(text))
            }
            _ => self.union(),
        }
    }
}

/// Parses a type expression.
///
/// ```text
/// expr := primary ('|' primary)*
/// primary := path ('[' arg (',' arg)* ']')?
/// path := ident ('.' ident)*
/// ```
pub fn parse_type_expr(text: &str) -> Result<TypeExprTree, TypeParseError> {
    let tokens = tokenize(text)?;
    let mut parser = Parser {
        input: text,
        tokens,
        pos: 0,
    };
    let tree = parser.union()?;
    match parser.peek() {
        Token::End => Ok(tree),
        Token::Close => Err(parser.error("unbalanced brackets: unexpected `]`")),
        other => Err(parser.error(format!("trailing tokens starting at {other}"))),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn leaf(s: &str) -> TypeExprTree {
        TypeExprTree::leaf(s)
    }

    #[test]
    fn generic_arguments() {
        let tree = parse_type_expr("Dict[str, int]").unwrap();
        assert_eq!(
            tree,
            TypeExprTree::generic("Dict", vec![leaf("str"), leaf("int")])
        );
    }

    #[test]
    fn dotted_head() {
        let tree = parse_type_expr("typing.Optional[str]").unwrap();
        assert_eq!(
            tree,
            TypeExprTree::generic("typing.Optional", vec![leaf("str")])
        );
    }

    #[test]
    fn pipe_union() {
        let tree = parse_type_expr("int |str").unwrap();
        assert_eq!(
            tree,
            TypeExprTree::generic("Union", vec![leaf("int"), leaf("str")])
        );
        let tree = parse_type_expr("int | str | None").unwrap();
        assert_eq!(tree.args.len(), 3);
    }

    #[test]
    fn whitespace_is_insignificant() {
        assert_eq!(
            parse_type_expr("  List [ typing . Any ]  ").unwrap(),
            parse_type_expr("List[typing.Any]").unwrap()
        );
    }

    #[test]
    fn callable_parameter_list() {
        let tree = parse_type_expr("Callable[[int, str], bool]").unwrap();
        assert_eq!(tree.head, "Callable");
        assert_eq!(
            tree.args[0],
            TypeExprTree::generic("[]", vec![leaf("int"), leaf("str")])
        );
        let tree = parse_type_expr("Callable[[], None]").unwrap();
        assert_eq!(tree.args[0], leaf("[]"));
    }

    #[test]
    fn ellipsis_and_literals() {
        let tree = parse_type_expr("Tuple[int, ...]").unwrap();
        assert_eq!(tree.args[1], leaf("..."));
        let tree = parse_type_expr("Literal['a', 3]").unwrap();
        assert_eq!(tree.args, vec![leaf("'a'"), leaf("3")]);
    }

    #[test]
    fn unbalanced_brackets() {
        let err = parse_type_expr("List[int").unwrap_err();
        assert_eq!(err.column, 8);
        assert!(err.message.contains("unbalanced"), "{err}");
        let err = parse_type_expr("List[int]]").unwrap_err();
        assert_eq!(err.column, 9);
        assert!(err.message.contains("unbalanced"), "{err}");
    }

    #[test]
    fn empty_path_segment() {
        let err = parse_type_expr("typing..List").unwrap_err();
        assert_eq!(err.column, 7);
        assert!(err.message.contains("empty path segment"));
        assert!(parse_type_expr(".int").is_err());
        assert!(parse_type_expr("int.").is_err());
    }

    #[test]
    fn trailing_tokens() {
        let err = parse_type_expr("int str").unwrap_err();
        assert_eq!(err.column, 4);
        assert!(err.message.contains("trailing"));
    }

    #[test]
    fn empty_input() {
        assert!(parse_type_expr("").is_err());
        assert!(parse_type_expr("   ").is_err());
        assert!(parse_type_expr("List[]").is_err());
    }

    #[test]
    fn display_round_trips_through_parser() {
        for text in [
            "Dict[str, List[int]]",
            "Callable[[int], str]",
            "Tuple[int, ...]",
        ] {
            let tree = parse_type_expr(text).unwrap();
            assert_eq!(parse_type_expr(&tree.to_string()).unwrap(), tree);
        }
    }
}
