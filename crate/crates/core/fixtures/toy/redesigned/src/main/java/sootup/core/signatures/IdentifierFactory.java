package sootup.core.signatures;

/** Creates class types and method signatures from their textual forms. */
public class IdentifierFactory {

    /** Returns the class type for a fully qualified class name. */
    public ClassType getClassType(String fullyQualifiedClassName) {
        int dot = fullyQualifiedClassName.lastIndexOf('.');
        String packageName = dot < 0 ? "" : fullyQualifiedClassName.substring(0, dot);
        String className = fullyQualifiedClassName.substring(dot + 1);
        return new ClassType(className, getPackageName(packageName));
    }

    /** Parses a method signature of the form {@code <Class: Type name(Params)>}. */
    public MethodSignature parseMethodSignature(String methodSignature) {
        if (!methodSignature.startsWith("<") || !methodSignature.endsWith(">")) {
            throw new IllegalArgumentException("invalid signature " + methodSignature);
        }
        String inner = methodSignature.substring(1, methodSignature.length() - 1);
        return MethodSignatureParser.parse(inner, this);
    }
}
