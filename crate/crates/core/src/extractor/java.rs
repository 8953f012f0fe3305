use std::collections::HashMap;

use tree_sitter::{Node, Parser};

use super::{ClassKind, ClassRecord, ExtractConfig, FileExtraction, MethodRecord, TypedName};

#[derive(Clone)]
struct Scope {
    qualified: String,
    /// Innermost named class; anonymous classes are numbered against it.
    named_owner: String,
    is_interface: bool,
}

struct Walker<'a> {
    src: &'a [u8],
    file: &'a str,
    is_test: bool,
    config: &'a ExtractConfig,
    package: String,
    classes: Vec<ClassRecord>,
    methods: Vec<MethodRecord>,
    anon_counters: HashMap<String, usize>,
}

pub(crate) fn extract_file(
    source: &str,
    file: &str,
    is_test: bool,
    config: &ExtractConfig,
) -> Result<FileExtraction, String> {
    let mut parser = Parser::new();
    parser
        .set_language(&tree_sitter_java::LANGUAGE.into())
        .map_err(|e| e.to_string())?;
    let tree = parser
        .parse(source, None)
        .ok_or_else(|| "parser produced no tree".to_string())?;
    let root = tree.root_node();
    if root.has_error() {
        let line = first_error_line(root).unwrap_or(0);
        return Err(format!("syntax error near line {line}"));
    }

    let mut walker = Walker {
        src: source.as_bytes(),
        file,
        is_test,
        config,
        package: String::new(),
        classes: Vec::new(),
        methods: Vec::new(),
        anon_counters: HashMap::new(),
    };
    walker.visit_program(root);
    Ok(FileExtraction {
        classes: walker.classes,
        methods: walker.methods,
    })
}

fn first_error_line(node: Node<'_>) -> Option<usize> {
    if node.is_error() || node.is_missing() {
        return Some(node.start_position().row + 1);
    }
    let mut cursor = node.walk();
    for child in node.children(&mut cursor) {
        if child.has_error() {
            if let Some(line) = first_error_line(child) {
                return Some(line);
            }
        }
    }
    None
}

fn is_type_declaration(kind: &str) -> bool {
    matches!(
        kind,
        "class_declaration"
            | "interface_declaration"
            | "enum_declaration"
            | "record_declaration"
            | "annotation_type_declaration"
    )
}

fn is_comment(kind: &str) -> bool {
    matches!(kind, "line_comment" | "block_comment")
}

impl<'a> Walker<'a> {
    fn text(&self, node: Node<'_>) -> &'a str {
        node.utf8_text(self.src).unwrap_or("")
    }

    /// Source text with internal whitespace runs collapsed to one space.
    fn compact_text(&self, node: Node<'_>) -> String {
        self.text(node).split_whitespace().collect::<Vec<_>>().join(" ")
    }

    fn visit_program(&mut self, root: Node<'_>) {
        let mut cursor = root.walk();
        for child in root.named_children(&mut cursor) {
            if child.kind() == "package_declaration" {
                let mut inner = child.walk();
                let name = child
                    .named_children(&mut inner)
                    .find(|n| matches!(n.kind(), "scoped_identifier" | "identifier"));
                if let Some(name) = name {
                    self.package = self.compact_text(name).replace(' ', "");
                }
            } else if is_type_declaration(child.kind()) {
                self.visit_type_decl(child, None);
            }
        }
    }

    fn visit_type_decl(&mut self, node: Node<'_>, parent: Option<&str>) {
        let Some(name) = node.child_by_field_name("name") else {
            return;
        };
        let name = self.text(name);
        let qualified = match parent {
            Some(p) => format!("{p}.{name}"),
            None if self.package.is_empty() => name.to_string(),
            None => format!("{}.{name}", self.package),
        };
        let kind = match node.kind() {
            "enum_declaration" => ClassKind::Enum,
            "interface_declaration" | "annotation_type_declaration" => ClassKind::Interface,
            "record_declaration" => ClassKind::Record,
            _ => ClassKind::Class,
        };
        self.classes.push(ClassRecord {
            qualified_name: qualified.clone(),
            package: self.package.clone(),
            class_doc: self.javadoc_before(node),
            file_path: self.file.to_string(),
            kind,
        });
        let scope = Scope {
            named_owner: qualified.clone(),
            qualified,
            is_interface: kind == ClassKind::Interface,
        };
        if let Some(body) = node.child_by_field_name("body") {
            self.visit_body(body, &scope);
        }
    }

    fn visit_body(&mut self, body: Node<'_>, scope: &Scope) {
        let mut cursor = body.walk();
        let children: Vec<Node<'_>> = body.named_children(&mut cursor).collect();
        for child in children {
            match child.kind() {
                k if is_type_declaration(k) => self.visit_type_decl(child, Some(&scope.qualified)),
                k if is_comment(k) => {}
                "method_declaration" => self.visit_method(child, scope),
                "enum_body_declarations" => self.visit_body(child, scope),
                "enum_constant" => {
                    if let Some(args) = child.child_by_field_name("arguments") {
                        self.scan_nested(args, scope);
                    }
                    if let Some(class_body) = child.child_by_field_name("body") {
                        self.visit_anonymous(class_body, scope);
                    }
                }
                // Constructors, fields and initializers are not extracted, but
                // may still hold anonymous or local classes.
                _ => self.scan_nested(child, scope),
            }
        }
    }

    fn visit_anonymous(&mut self, class_body: Node<'_>, scope: &Scope) {
        let counter = self.anon_counters.entry(scope.named_owner.clone()).or_insert(0);
        *counter += 1;
        let qualified = format!("{}${}", scope.named_owner, counter);
        self.classes.push(ClassRecord {
            qualified_name: qualified.clone(),
            package: self.package.clone(),
            class_doc: String::new(),
            file_path: self.file.to_string(),
            kind: ClassKind::Class,
        });
        let inner = Scope {
            qualified,
            named_owner: scope.named_owner.clone(),
            is_interface: false,
        };
        self.visit_body(class_body, &inner);
    }

    /// Finds anonymous and local classes below `node` in source order.
    fn scan_nested(&mut self, node: Node<'_>, scope: &Scope) {
        let mut cursor = node.walk();
        let children: Vec<Node<'_>> = node.named_children(&mut cursor).collect();
        for child in children {
            match child.kind() {
                k if is_type_declaration(k) => self.visit_type_decl(child, Some(&scope.qualified)),
                "class_body" if node.kind() == "object_creation_expression" => {
                    self.visit_anonymous(child, scope)
                }
                _ => self.scan_nested(child, scope),
            }
        }
    }

    fn visit_method(&mut self, node: Node<'_>, scope: &Scope) {
        let body = node.child_by_field_name("body");
        let name = node
            .child_by_field_name("name")
            .map(|n| self.text(n).to_string())
            .unwrap_or_default();
        let params = node
            .child_by_field_name("parameters")
            .map(|p| self.parameters(p))
            .unwrap_or_default();

        let excluded = scope.is_interface
            || body.is_none()
            || self
                .config
                .excluded_methods
                .iter()
                .any(|m| m.matches(&name, params.len()));

        if let Some(body) = body {
            if !excluded {
                self.push_method(node, body, scope, name, params);
            }
            self.scan_nested(body, scope);
        }
    }

    fn push_method(
        &mut self,
        node: Node<'_>,
        body: Node<'_>,
        scope: &Scope,
        method_name: String,
        params: Vec<TypedName>,
    ) {
        let mut return_type = node
            .child_by_field_name("type")
            .map(|t| self.compact_text(t))
            .unwrap_or_default();
        if let Some(dims) = node.child_by_field_name("dimensions") {
            return_type.push_str(&self.compact_text(dims).replace(' ', ""));
        }

        let mut local_vars = Vec::new();
        self.collect_locals(body, &mut local_vars);
        let mut inline_comments = Vec::new();
        self.collect_comments(body, &mut inline_comments);

        let start_line = node.start_position().row + 1;
        let end_line = node.end_position().row + 1;
        let id = MethodRecord::make_id(&scope.qualified, &method_name, &params, start_line, end_line);
        self.methods.push(MethodRecord {
            id,
            class_name: scope.qualified.clone(),
            file_path: self.file.to_string(),
            method_name,
            return_type,
            params,
            local_vars,
            method_doc: self.javadoc_before(node),
            inline_comments,
            start_line,
            end_line,
            loc: end_line - start_line + 1,
            body_text: self.text(node).to_string(),
            is_test: self.is_test,
        });
    }

    fn parameters(&self, node: Node<'_>) -> Vec<TypedName> {
        let mut out = Vec::new();
        let mut cursor = node.walk();
        for param in node.named_children(&mut cursor) {
            match param.kind() {
                "formal_parameter" => {
                    let mut ty = param
                        .child_by_field_name("type")
                        .map(|t| self.compact_text(t))
                        .unwrap_or_default();
                    if let Some(dims) = param.child_by_field_name("dimensions") {
                        ty.push_str(&self.compact_text(dims).replace(' ', ""));
                    }
                    let name = param
                        .child_by_field_name("name")
                        .map(|n| self.text(n).to_string())
                        .unwrap_or_default();
                    out.push(TypedName::new(ty, name));
                }
                "spread_parameter" => {
                    let mut inner = param.walk();
                    let mut ty = String::new();
                    let mut name = String::new();
                    for part in param.named_children(&mut inner) {
                        match part.kind() {
                            "modifiers" => {}
                            "variable_declarator" => {
                                if let Some(n) = part.child_by_field_name("name") {
                                    name = self.text(n).to_string();
                                }
                            }
                            k if is_comment(k) => {}
                            _ if ty.is_empty() => ty = self.compact_text(part),
                            _ => {}
                        }
                    }
                    ty.push_str("...");
                    out.push(TypedName::new(ty, name));
                }
                _ => {}
            }
        }
        out
    }

    /// Local declarations of this method only; nested class bodies own theirs.
    fn collect_locals(&self, node: Node<'_>, out: &mut Vec<TypedName>) {
        let mut cursor = node.walk();
        for child in node.named_children(&mut cursor) {
            match child.kind() {
                "class_body" => continue,
                k if is_type_declaration(k) => continue,
                "local_variable_declaration" => {
                    let ty = child
                        .child_by_field_name("type")
                        .map(|t| self.compact_text(t))
                        .unwrap_or_default();
                    let mut decls = child.walk();
                    for decl in child.children_by_field_name("declarator", &mut decls) {
                        if let Some(name) = decl.child_by_field_name("name") {
                            out.push(TypedName::new(ty.clone(), self.text(name)));
                        }
                    }
                }
                "enhanced_for_statement" | "resource" => {
                    if let (Some(ty), Some(name)) = (
                        child.child_by_field_name("type"),
                        child.child_by_field_name("name"),
                    ) {
                        out.push(TypedName::new(self.compact_text(ty), self.text(name)));
                    }
                }
                _ => {}
            }
            self.collect_locals(child, out);
        }
    }

    fn collect_comments(&self, node: Node<'_>, out: &mut Vec<String>) {
        let mut cursor = node.walk();
        for child in node.children(&mut cursor) {
            if is_comment(child.kind()) {
                let text = clean_comment(self.text(child));
                if !text.is_empty() {
                    out.push(text);
                }
            } else {
                self.collect_comments(child, out);
            }
        }
    }

    fn javadoc_before(&self, node: Node<'_>) -> String {
        match node.prev_sibling() {
            Some(prev) if prev.kind() == "block_comment" => {
                let text = self.text(prev);
                if text.starts_with("/**") {
                    clean_comment(text)
                } else {
                    String::new()
                }
            }
            _ => String::new(),
        }
    }
}

/// Strips comment delimiters and leading `*` gutters, keeping line breaks.
pub(crate) fn clean_comment(raw: &str) -> String {
    let inner = if let Some(rest) = raw.strip_prefix("//") {
        rest
    } else if let Some(rest) = raw.strip_prefix("/*") {
        let rest = rest.strip_prefix('*').unwrap_or(rest);
        rest.strip_suffix("*/").unwrap_or(rest)
    } else {
        raw
    };
    let lines: Vec<&str> = inner
        .lines()
        .map(|line| line.trim().trim_start_matches('*').trim())
        .collect();
    let first = lines.iter().position(|l| !l.is_empty());
    let last = lines.iter().rposition(|l| !l.is_empty());
    match (first, last) {
        (Some(a), Some(b)) => lines[a..=b].join("\n"),
        _ => String::new(),
    }
}
