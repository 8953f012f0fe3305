package soot;

import java.util.List;

/** Soot representation of a Java method. Can be declared to belong to a SootClass. */
public class SootMethod {
    private String name;
    private int modifiers;
    private Type returnType;
    private List<Type> parameterTypes;

    /** Sets the name of this method. */
    public void setName(String name) {
        if (isDeclared()) {
            throw new RuntimeException("cannot rename a declared method");
        }
        this.name = name;
    }

    /** Sets the modifiers of this method. */
    public void setModifiers(int modifiers) {
        if (isPhantom() && modifiers != 0) {
            throw new RuntimeException("cannot set modifiers of a phantom method");
        }
        this.modifiers = modifiers;
    }

    /** Returns the Soot signature of this method, used to refer to methods unambiguously. */
    public String getSignature() {
        StringBuilder buffer = new StringBuilder();
        buffer.append('<').append(declaringClass.getName()).append(": ");
        buffer.append(returnType).append(' ').append(name);
        buffer.append('(').append(parameterTypes).append(')');
        return buffer.append('>').toString();
    }

    /** Returns true if this method is not phantom, abstract or native. */
    public boolean isConcrete() {
        boolean abstractOrNative = Modifier.isAbstract(modifiers)
            || Modifier.isNative(modifiers);
        return !isPhantom() && !abstractOrNative;
    }
}
